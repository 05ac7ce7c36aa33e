// Character-provenance model behind the editor.
//
// Every visible character carries where it came from; serializing the model
// yields the revised translation plus its parallel tag string (alphabet
// "kirdb"). Deleted and blank-marked hypothesis text stays visible, a bare
// blank insertion is the "*" placeholder, and typing over hypothesis text
// records a replace rather than delete+insert.

export const PLACEHOLDER = "*";

export type CellKind = "hyp" | "ins" | "rep" | "blank" | "del";

export interface Cell {
  ch: string;
  kind: CellKind;
}

export interface TaggedPayload {
  text: string;
  tags: string;
}

const TAG_OF: Record<CellKind, string> = {
  hyp: "k",
  ins: "i",
  rep: "r",
  blank: "b",
  del: "d",
};

// kinds whose characters originate in the hypothesis being edited
const BASE_KINDS: ReadonlySet<CellKind> = new Set(["hyp", "blank", "del"]);

export class EditorModel {
  private cells: Cell[] = [];

  constructor(hypothesis = "") {
    this.reset(hypothesis);
  }

  reset(hypothesis: string): void {
    this.cells = [...hypothesis].map((ch) => ({ ch, kind: "hyp" as CellKind }));
  }

  get length(): number {
    return this.cells.length;
  }

  snapshot(): readonly Cell[] {
    return this.cells.map((c) => ({ ...c }));
  }

  visibleText(): string {
    return this.cells.map((c) => c.ch).join("");
  }

  hasEdits(): boolean {
    return this.cells.some((c) => c.kind !== "hyp");
  }

  private splice(start: number, end: number, replacement: Cell[]): void {
    this.checkRange(start, end);
    this.cells.splice(start, end - start, ...replacement);
  }

  private checkRange(start: number, end: number): void {
    if (start < 0 || end < start || end > this.cells.length) {
      throw new RangeError(`bad range [${start}, ${end}) of ${this.cells.length}`);
    }
  }

  /** Type `text` over the selection [start, end) (empty selection = caret).
   *
   * Consuming any hypothesis-derived character makes the typed run a
   * replace; typing that only displaces the user's own characters stays an
   * insert.
   */
  typeText(start: number, end: number, text: string): void {
    this.checkRange(start, end);
    const removed = this.cells.slice(start, end);
    const overBase = removed.some((c) => BASE_KINDS.has(c.kind));
    const kind: CellKind = overBase ? "rep" : "ins";
    this.splice(start, end, [...text].map((ch) => ({ ch, kind })));
  }

  /** Mark the selection for regeneration: hypothesis text is retained and
   * blank-tagged, the user's own characters vanish; a selection of only
   * typed characters leaves a bare placeholder so the blank survives. */
  markBlank(start: number, end: number): void {
    this.checkRange(start, end);
    const range = this.cells.slice(start, end);
    const marked: Cell[] = [];
    for (const c of range) {
      if (BASE_KINDS.has(c.kind)) {
        marked.push({ ch: c.ch, kind: "blank" });
      }
    }
    if (marked.length === 0 && range.length > 0) {
      marked.push({ ch: PLACEHOLDER, kind: "blank" });
    }
    this.splice(start, end, marked);
  }

  /** Mark the selection as redundant: hypothesis text is retained and
   * delete-tagged; the user's own characters are simply removed. */
  markDelete(start: number, end: number): void {
    this.checkRange(start, end);
    const range = this.cells.slice(start, end);
    const marked: Cell[] = [];
    for (const c of range) {
      if (BASE_KINDS.has(c.kind)) {
        marked.push({ ch: c.ch, kind: "del" });
      }
    }
    this.splice(start, end, marked);
  }

  /** Insert a bare blank placeholder at the caret. */
  insertPlaceholder(at: number): void {
    this.splice(at, at, [{ ch: PLACEHOLDER, kind: "blank" }]);
  }

  /** Serialize to the wire payload, fusing delete+insert combinations on a
   * contiguous span into replaces (the deleted text is dropped, the typed
   * characters become the replacement). */
  capture(): TaggedPayload {
    const runs: { kind: CellKind; cells: Cell[] }[] = [];
    for (const cell of this.cells) {
      const last = runs[runs.length - 1];
      if (last && last.kind === cell.kind) {
        last.cells.push(cell);
      } else {
        runs.push({ kind: cell.kind, cells: [cell] });
      }
    }
    const out: { kind: CellKind; cells: Cell[] }[] = [];
    let i = 0;
    while (i < runs.length) {
      const run = runs[i];
      const next = runs[i + 1];
      if (run.kind === "del" && next?.kind === "ins") {
        out.push({ kind: "rep", cells: next.cells });
        i += 2;
        continue;
      }
      if (run.kind === "ins" && next?.kind === "del") {
        out.push({ kind: "rep", cells: run.cells });
        i += 2;
        continue;
      }
      out.push(run);
      i += 1;
    }
    let text = "";
    let tags = "";
    for (const run of out) {
      for (const cell of run.cells) {
        text += cell.ch;
        tags += TAG_OF[run.kind];
      }
    }
    return { text, tags };
  }
}
