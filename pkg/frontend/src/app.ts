// Browser wiring: an editable area backed by the provenance model, the
// Translate / Submit flow against the session service, and colored spans
// for constraint vs generated text after each turn.
//
// Hotkeys (configurable below): Ctrl+B mark selection as blank, Ctrl+D mark
// selection as deleted, Ctrl+U insert a bare blank placeholder.

import { ApiClient, RequestInFlightError, SpanInfo } from "./api.js";
import { Cell, EditorModel } from "./model.js";
import { renderSpans } from "./render.js";

export interface Hotkeys {
  blank: string;
  del: string;
  placeholder: string;
}

export const DEFAULT_HOTKEYS: Hotkeys = { blank: "b", del: "d", placeholder: "u" };

const KIND_CLASS: Record<Cell["kind"], string> = {
  hyp: "cell-hyp",
  ins: "cell-ins",
  rep: "cell-rep",
  blank: "cell-blank",
  del: "cell-del",
};

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

export class App {
  private model = new EditorModel();
  private sessionId: string | null = null;
  private lastSpans: SpanInfo[] | null = null;

  private editor = el<HTMLDivElement>("editor");
  private sourceBox = el<HTMLTextAreaElement>("source");
  private referenceBox = el<HTMLTextAreaElement>("reference");
  private startBtn = el<HTMLButtonElement>("start");
  private translateBtn = el<HTMLButtonElement>("translate");
  private submitBtn = el<HTMLButtonElement>("submit");
  private mtpeBox = el<HTMLInputElement>("mtpe");
  private banner = el<HTMLDivElement>("banner");
  private resultBox = el<HTMLDivElement>("result");

  constructor(
    private api = new ApiClient(),
    private hotkeys: Hotkeys = DEFAULT_HOTKEYS,
  ) {
    this.startBtn.addEventListener("click", () => void this.start());
    this.translateBtn.addEventListener("click", () => void this.translate());
    this.submitBtn.addEventListener("click", () => void this.submit());
    this.editor.addEventListener("beforeinput", (e) => this.onBeforeInput(e as InputEvent));
    this.editor.addEventListener("keydown", (e) => this.onKeyDown(e));
    this.refresh();
  }

  // --- selection bookkeeping -------------------------------------------------

  private selection(): { start: number; end: number } {
    const sel = window.getSelection();
    if (!sel || sel.rangeCount === 0) return { start: this.model.length, end: this.model.length };
    const range = sel.getRangeAt(0);
    const offsetOf = (node: Node, offset: number): number => {
      let pos = 0;
      for (const child of Array.from(this.editor.childNodes)) {
        if (child === node || child.contains(node)) {
          return pos + offset;
        }
        pos += (child.textContent ?? "").length;
      }
      return pos;
    };
    const start = offsetOf(range.startContainer, range.startOffset);
    const end = offsetOf(range.endContainer, range.endOffset);
    return { start: Math.min(start, end), end: Math.max(start, end) };
  }

  private setCaret(pos: number): void {
    const sel = window.getSelection();
    if (!sel) return;
    let remaining = pos;
    for (const child of Array.from(this.editor.childNodes)) {
      const len = (child.textContent ?? "").length;
      if (remaining <= len) {
        const target = child.firstChild ?? child;
        const range = document.createRange();
        range.setStart(target, remaining);
        range.collapse(true);
        sel.removeAllRanges();
        sel.addRange(range);
        return;
      }
      remaining -= len;
    }
  }

  // --- edit capture ----------------------------------------------------------

  private onBeforeInput(e: InputEvent): void {
    if (this.sessionId === null) return;
    e.preventDefault();
    const { start, end } = this.selection();
    let caret = start;
    switch (e.inputType) {
      case "insertText":
      case "insertFromPaste": {
        const text = e.data ?? "";
        this.model.typeText(start, end, text);
        caret = start + text.length;
        break;
      }
      case "deleteContentBackward": {
        if (start === end && start > 0) this.model.markDelete(start - 1, start);
        else this.model.markDelete(start, end);
        caret = start === end ? start - 1 : start;
        break;
      }
      case "deleteContentForward": {
        if (start === end && end < this.model.length) this.model.markDelete(start, start + 1);
        else this.model.markDelete(start, end);
        break;
      }
      default:
        return;
    }
    this.refresh(Math.max(caret, 0));
  }

  private onKeyDown(e: KeyboardEvent): void {
    if (!(e.ctrlKey || e.metaKey) || this.sessionId === null) return;
    const key = e.key.toLowerCase();
    const { start, end } = this.selection();
    if (key === this.hotkeys.blank && end > start) {
      e.preventDefault();
      this.model.markBlank(start, end);
      this.refresh(start);
    } else if (key === this.hotkeys.del && end > start) {
      e.preventDefault();
      this.model.markDelete(start, end);
      this.refresh(start);
    } else if (key === this.hotkeys.placeholder) {
      e.preventDefault();
      this.model.insertPlaceholder(start);
      this.refresh(start + 1);
    }
  }

  // --- rendering ---------------------------------------------------------------

  private refresh(caret?: number): void {
    this.editor.textContent = "";
    for (const cell of this.model.snapshot()) {
      const span = document.createElement("span");
      span.className = KIND_CLASS[cell.kind];
      span.textContent = cell.ch;
      this.editor.appendChild(span);
    }
    this.translateBtn.disabled =
      this.sessionId === null || this.api.inFlight || !this.model.hasEdits();
    this.submitBtn.disabled = this.sessionId === null || this.api.inFlight;
    this.startBtn.disabled = this.api.inFlight;
    if (caret !== undefined) this.setCaret(caret);
  }

  private showHypothesis(hypothesis: string, spans: SpanInfo[] | null): void {
    this.model.reset(hypothesis);
    this.refresh();
    const view = el<HTMLDivElement>("colored");
    view.textContent = "";
    for (const piece of renderSpans(hypothesis, spans)) {
      const span = document.createElement("span");
      span.className = piece.style === "constraint" ? "span-constraint" : "span-generated";
      span.textContent = piece.text;
      view.appendChild(span);
    }
  }

  // --- flow ----------------------------------------------------------------------

  private async start(): Promise<void> {
    const source = this.sourceBox.value.trim();
    if (!source) return;
    try {
      const reference = this.referenceBox.value.trim() || undefined;
      const sess = await this.api.createSession(source, reference);
      this.sessionId = sess.id;
      this.banner.textContent = "";
      this.resultBox.textContent = "";
      this.lastSpans = null;
      this.showHypothesis(sess.hypothesis, null);
    } catch (err) {
      this.banner.textContent = String(err);
    }
    this.refresh();
  }

  private async translate(): Promise<void> {
    if (this.sessionId === null || this.api.inFlight || !this.model.hasEdits()) return;
    const payload = this.model.capture();
    this.refresh();
    try {
      const reply = await this.api.postTurn(this.sessionId, payload);
      this.lastSpans = reply.spans;
      this.banner.textContent = reply.violation
        ? "constraint violation: the system ignored part of your template"
        : "";
      this.showHypothesis(reply.hypothesis, reply.spans);
    } catch (err) {
      if (!(err instanceof RequestInFlightError)) this.banner.textContent = String(err);
    }
    this.refresh();
  }

  private async submit(): Promise<void> {
    if (this.sessionId === null || this.api.inFlight) return;
    try {
      const metrics = await this.api.submit(
        this.sessionId,
        this.model.visibleText(),
        this.mtpeBox.checked,
      );
      this.resultBox.textContent =
        `editing cost ${metrics.ec}, ` +
        `${metrics.success ? "success" : "not successful"}, ` +
        `${metrics.at} turns`;
      this.sessionId = null;
    } catch (err) {
      if (!(err instanceof RequestInFlightError)) this.banner.textContent = String(err);
    }
    this.refresh();
  }
}

declare global {
  interface Window {
    imtevalApp?: App;
  }
}

if (typeof document !== "undefined" && document.getElementById("editor")) {
  window.imtevalApp = new App();
}
