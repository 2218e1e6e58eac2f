"""
Tensor files and the command line
=================================

Tensors are stored as JSON with 1-based sorted indices; only one entry per
symmetric orbit is listed. The same commands are available from a shell as
``coposdp check FILE`` or ``python -m coposdp check FILE``.
"""
import tempfile
from pathlib import Path

from coposdp.cli import parse_tensor_file, run, write_tensor_file
from coposdp.instances import motzkin

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "motzkin.json"
    write_tensor_file(motzkin(), path, name="motzkin")
    print(path.read_text())
    assert parse_tensor_file(path) == motzkin()

    # exit code 0 means copositive
    code = run(["check", str(path)])
    print("exit code", code)

    run(["check", str(path), "--format", "json", "--full-precision"])

run(["sweep", "hypergraph-ex48"])
run(["examples"])
