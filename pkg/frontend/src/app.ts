/** Browser entry point: wires the four panes (text, tags, attributes, XML)
 * to the pure editor state. All annotation writes go through save() → PUT.
 */

import { HttpApiClient } from "./api.js";
import { tagAvailability } from "./availability.js";
import { loadDocument, save } from "./ops.js";
import {
  EditorState,
  EditorTag,
  applyTag,
  attributeKeys,
  selectFrame,
  selectSpan,
  setFrameAttribute,
  setSelection,
  setSpanAttribute,
  xmlPane,
} from "./state.js";
import { AnnotationSchema, innerTag } from "./types.js";

const ROLE_CLASS: Record<string, string> = {
  interaction: "role-interaction",
  agent: "role-agent",
  target: "role-target",
  confidence: "role-confidence",
};

class EditorApp {
  private client = new HttpApiClient("");
  private schema!: AnnotationSchema;
  private state: EditorState | null = null;

  private el(id: string): HTMLElement {
    return document.getElementById(id)!;
  }

  async start(): Promise<void> {
    this.schema = await this.client.getSchema();
    const docs = await this.client.listDocuments();
    const picker = this.el("doc-picker") as HTMLSelectElement;
    picker.innerHTML = "";
    for (const doc of docs) {
      const opt = document.createElement("option");
      opt.value = doc.id;
      opt.textContent = `${doc.id} (v${doc.version})`;
      picker.appendChild(opt);
    }
    picker.onchange = () => void this.open(picker.value);
    this.el("save-button").onclick = () => void this.save();
    if (docs.length > 0) await this.open(docs[0].id);
  }

  private async open(id: string): Promise<void> {
    this.state = await loadDocument(this.client, id);
    this.render();
  }

  private async save(): Promise<void> {
    if (!this.state) return;
    const outcome = await save(this.client, this.state, this.schema);
    this.state = outcome.state;
    if (outcome.kind === "conflict") {
      const reload = window.confirm(
        `Version conflict: the document is now at version ${outcome.currentVersion}. ` +
          "Reload and lose local edits?",
      );
      if (reload) await this.open(this.state.docId);
    }
    this.render();
  }

  private update(next: EditorState): void {
    this.state = next;
    this.render();
  }

  private render(): void {
    const state = this.state;
    if (!state) return;
    this.renderText(state);
    this.renderTags(state);
    this.renderAttributes(state);
    this.el("xml-pane").textContent = xmlPane(state);
    this.el("status").textContent =
      (state.dirty ? "unsaved edits" : "saved") +
      ` — version ${state.version}` +
      (state.violations.length ? ` — ${state.violations.length} violation(s)` : "");
  }

  private renderText(state: EditorState): void {
    const pane = this.el("text-pane");
    pane.innerHTML = "";
    // per-role styling: emit the sentence as runs, marking entity spans
    const marks: { start: number; end: number; cls: string; title: string }[] = [];
    for (const frame of state.frames) {
      const bad = new Set(state.violations.filter((v) => v.frame_id === frame.id).map(() => frame.id));
      for (const span of frame.spans) {
        marks.push({
          start: span.inner[0],
          end: span.inner[1],
          cls: ROLE_CLASS[span.role] + (bad.size ? " violating" : ""),
          title: `${innerTag(span)} in frame ${frame.id}`,
        });
      }
    }
    marks.sort((a, b) => a.start - b.start);
    let pos = 0;
    for (const mark of marks) {
      if (mark.start > pos) pane.appendChild(document.createTextNode(state.text.slice(pos, mark.start)));
      const span = document.createElement("span");
      span.className = mark.cls;
      span.title = mark.title;
      span.textContent = state.text.slice(mark.start, mark.end);
      pane.appendChild(span);
      pos = Math.max(pos, mark.end);
    }
    pane.appendChild(document.createTextNode(state.text.slice(pos)));

    pane.onmouseup = () => {
      const sel = window.getSelection();
      if (!sel || sel.rangeCount === 0 || !this.state) return;
      const range = sel.getRangeAt(0);
      const pre = range.cloneRange();
      pre.selectNodeContents(pane);
      pre.setEnd(range.startContainer, range.startOffset);
      const start = pre.toString().length;
      const length = range.toString().length;
      if (length > 0) this.update(setSelection(this.state, [start, start + length]));
    };
  }

  private renderTags(state: EditorState): void {
    const pane = this.el("tag-pane");
    pane.innerHTML = "";
    for (const avail of tagAvailability(this.schema, state)) {
      const button = document.createElement("button");
      button.textContent = avail.tag;
      button.disabled = !avail.enabled;
      button.title = avail.reason;
      button.onclick = () => {
        if (!this.state || !this.state.selection) return;
        this.update(applyTag(this.state, avail.tag as EditorTag, this.state.selection));
      };
      pane.appendChild(button);
    }
  }

  private renderAttributes(state: EditorState): void {
    const pane = this.el("attr-pane");
    pane.innerHTML = "";
    const keys = attributeKeys(state, this.schema);
    const onSpan = state.selectedSpan !== null;
    const current = onSpan
      ? state.frames[state.selectedSpan![0]].spans[state.selectedSpan![1]].attrs
      : state.selectedFrame !== null
        ? state.frames[state.selectedFrame].attrs
        : {};
    for (const key of keys) {
      const role = onSpan ? state.frames[state.selectedSpan![0]].spans[state.selectedSpan![1]].role : null;
      const allowed = onSpan
        ? this.schema.span_attributes[role!][key]
        : this.schema.frame_attributes[key];
      const label = document.createElement("label");
      label.textContent = key;
      const select = document.createElement("select");
      select.appendChild(document.createElement("option"));
      for (const value of allowed) {
        const opt = document.createElement("option");
        opt.value = value;
        opt.textContent = value;
        opt.selected = current[key] === value;
        select.appendChild(opt);
      }
      select.onchange = () => {
        if (!this.state) return;
        this.update(
          onSpan
            ? setSpanAttribute(this.state, state.selectedSpan![0], state.selectedSpan![1], key, select.value)
            : setFrameAttribute(this.state, state.selectedFrame!, key, select.value),
        );
      };
      label.appendChild(select);
      pane.appendChild(label);
    }
    // frame/span pickers
    const list = document.createElement("div");
    state.frames.forEach((frame, fi) => {
      const item = document.createElement("button");
      item.textContent = `frame ${frame.id}`;
      item.className = state.selectedFrame === fi ? "selected" : "";
      item.onclick = () => this.state && this.update(selectFrame(this.state, fi));
      list.appendChild(item);
      frame.spans.forEach((span, si) => {
        const sitem = document.createElement("button");
        sitem.textContent = innerTag(span);
        sitem.className =
          state.selectedSpan && state.selectedSpan[0] === fi && state.selectedSpan[1] === si
            ? "selected"
            : "";
        sitem.onclick = () => this.state && this.update(selectSpan(this.state, fi, si));
        list.appendChild(sitem);
      });
    });
    pane.appendChild(list);
  }
}

if (typeof document !== "undefined") {
  void new EditorApp().start();
}
