"""HTTP service backing the annotation editor.

One XML file per document plus a JSON index; saves use optimistic
versioning (PUT carries the version it was based on, mismatch is a 409).
"""

from __future__ import annotations

import json
import threading
from pathlib import Path

from fastapi import FastAPI
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .annotations import (
    InteractionFrame,
    load_schema,
    parse_annotation_xml,
    serialize_annotation_xml,
    validate_frame,
)


class AnnotationStore:
    """Filesystem store: `store/{doc_id}.xml` + `store/index.json`."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        if not self.root.is_dir():
            raise FileNotFoundError(f"store directory does not exist: {self.root}")
        self._lock = threading.Lock()
        self._index_path = self.root / "index.json"
        if not self._index_path.exists():
            self._write_index({})

    def _read_index(self) -> dict[str, int]:
        return json.loads(self._index_path.read_text("utf-8"))

    def _write_index(self, index: dict[str, int]) -> None:
        self._index_path.write_text(json.dumps(index, indent=1, sort_keys=True), "utf-8")

    def list_documents(self) -> dict[str, int]:
        with self._lock:
            return self._read_index()

    def add_document(self, doc_id: str, text: str) -> None:
        """Register a new unannotated document at version 0."""
        with self._lock:
            index = self._read_index()
            if doc_id in index:
                raise ValueError(f"document {doc_id!r} already exists")
            (self.root / f"{doc_id}.xml").write_text(
                serialize_annotation_xml([], text), "utf-8")
            index[doc_id] = 0
            self._write_index(index)

    def get(self, doc_id: str) -> tuple[str, list[InteractionFrame], int] | None:
        with self._lock:
            index = self._read_index()
            if doc_id not in index:
                return None
            parsed = parse_annotation_xml((self.root / f"{doc_id}.xml").read_text("utf-8"))
            return parsed.text, parsed.frames, index[doc_id]

    def put(self, doc_id: str, frames: list[InteractionFrame],
            expected_version: int) -> tuple[str, int | None, list]:
        """Returns (status, new_version, violations).

        status is one of "ok", "not_found", "conflict", "invalid".
        The stored file is untouched unless status is "ok".
        """
        with self._lock:
            index = self._read_index()
            if doc_id not in index:
                return "not_found", None, []
            if index[doc_id] != expected_version:
                return "conflict", index[doc_id], []
            parsed = parse_annotation_xml((self.root / f"{doc_id}.xml").read_text("utf-8"))
            violations = []
            for frame in frames:
                violations.extend(validate_frame(frame, text_length=len(parsed.text)))
            if violations:
                return "invalid", None, violations
            (self.root / f"{doc_id}.xml").write_text(
                serialize_annotation_xml(frames, parsed.text), "utf-8")
            index[doc_id] += 1
            self._write_index(index)
            return "ok", index[doc_id], []


class PutAnnotationsBody(BaseModel):
    version: int
    frames: list[dict]


def create_app(store: AnnotationStore | str | Path,
               frontend_dir: str | Path | None = None) -> FastAPI:
    if not isinstance(store, AnnotationStore):
        store = AnnotationStore(store)
    app = FastAPI(title="genic annotation service")

    @app.get("/documents")
    def list_documents():
        index = store.list_documents()
        return {"documents": [{"id": doc_id, "version": version}
                              for doc_id, version in sorted(index.items())]}

    @app.get("/documents/{doc_id}")
    def get_document(doc_id: str):
        found = store.get(doc_id)
        if found is None:
            return JSONResponse(status_code=404, content={"error": f"unknown document {doc_id!r}"})
        text, frames, version = found
        return {"id": doc_id, "text": text, "version": version,
                "frames": [f.to_json_obj() for f in frames]}

    @app.put("/documents/{doc_id}/annotations")
    def put_annotations(doc_id: str, body: PutAnnotationsBody):
        try:
            frames = [InteractionFrame.from_json_obj(obj) for obj in body.frames]
        except (KeyError, TypeError, ValueError) as exc:
            return JSONResponse(status_code=422,
                                content={"error": f"bad frame payload: {exc}"})
        status, version, violations = store.put(doc_id, frames, body.version)
        if status == "not_found":
            return JSONResponse(status_code=404, content={"error": f"unknown document {doc_id!r}"})
        if status == "conflict":
            return JSONResponse(status_code=409,
                                content={"error": "version conflict", "current_version": version})
        if status == "invalid":
            return JSONResponse(status_code=422, content={
                "error": "validation failed",
                "violations": [{"code": v.code, "message": v.message, "frame_id": v.frame_id}
                               for v in violations]})
        return {"id": doc_id, "version": version}

    @app.get("/schema")
    def get_schema():
        return load_schema()

    if frontend_dir is not None and Path(frontend_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(frontend_dir), html=True), name="editor")

    return app
