import json
import shutil
from pathlib import Path

TEMP_DIR = Path(__file__).parent / "temp_files"


def write_test_document(name: str, payload) -> str:
    """Writes a JSON document into the tests temp directory and returns its path"""
    TEMP_DIR.mkdir(exist_ok=True)
    path = TEMP_DIR / name
    if isinstance(payload, str):
        path.write_text(payload, encoding='utf-8')
    else:
        path.write_text(json.dumps(payload), encoding='utf-8')
    return str(path)


def remove_test_documents():
    """Removes everything written by write_test_document"""
    shutil.rmtree(TEMP_DIR, ignore_errors=True)
