/** Annotation service client.
 *
 * The editor's only write path is PUT /documents/{id}/annotations; every
 * other call is a read. The interface exists so tests can substitute an
 * in-memory service with the same version/validation semantics.
 */

import { AnnotationSchema, InteractionFrame, Violation } from "./types.js";

export interface DocumentListEntry {
  id: string;
  version: number;
}

export interface DocumentPayload {
  id: string;
  text: string;
  version: number;
  frames: InteractionFrame[];
}

export type PutResult =
  | { kind: "ok"; version: number }
  | { kind: "not_found" }
  | { kind: "conflict"; currentVersion: number }
  | { kind: "invalid"; violations: Violation[] };

export interface ApiClient {
  listDocuments(): Promise<DocumentListEntry[]>;
  getDocument(id: string): Promise<DocumentPayload | null>;
  putAnnotations(id: string, version: number, frames: InteractionFrame[]): Promise<PutResult>;
  getSchema(): Promise<AnnotationSchema>;
}

export class HttpApiClient implements ApiClient {
  constructor(private readonly base: string = "") {}

  async listDocuments(): Promise<DocumentListEntry[]> {
    const res = await fetch(`${this.base}/documents`);
    if (!res.ok) throw new Error(`GET /documents failed: ${res.status}`);
    const body = await res.json();
    return body.documents;
  }

  async getDocument(id: string): Promise<DocumentPayload | null> {
    const res = await fetch(`${this.base}/documents/${encodeURIComponent(id)}`);
    if (res.status === 404) return null;
    if (!res.ok) throw new Error(`GET /documents/${id} failed: ${res.status}`);
    return (await res.json()) as DocumentPayload;
  }

  async putAnnotations(
    id: string,
    version: number,
    frames: InteractionFrame[],
  ): Promise<PutResult> {
    const res = await fetch(`${this.base}/documents/${encodeURIComponent(id)}/annotations`, {
      method: "PUT",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ version, frames }),
    });
    if (res.status === 404) return { kind: "not_found" };
    if (res.status === 409) {
      const body = await res.json();
      return { kind: "conflict", currentVersion: body.current_version };
    }
    if (res.status === 422) {
      const body = await res.json();
      return { kind: "invalid", violations: body.violations ?? [] };
    }
    if (!res.ok) throw new Error(`PUT annotations failed: ${res.status}`);
    const body = await res.json();
    return { kind: "ok", version: body.version };
  }

  async getSchema(): Promise<AnnotationSchema> {
    const res = await fetch(`${this.base}/schema`);
    if (!res.ok) throw new Error(`GET /schema failed: ${res.status}`);
    return (await res.json()) as AnnotationSchema;
  }
}
