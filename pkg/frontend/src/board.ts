import { button, clear, el } from "./dom";
import { AGENTS, PRIZES, UNPAIRED_ROW } from "./types";

export interface BoardShape {
  rows: string[];
  disabledRows: string[];
  proposers: string[];
}

/** Row and box sets for each direction of the procedure. Receivers are rows,
 * proposers are movable boxes. When prizes propose, the participant's own row
 * is shown but inert, and an extra row collects prizes that ran out of
 * receivers to ask. */
export function boardShape(direction: string): BoardShape {
  if (direction === "prize-proposing-excluding") {
    return {
      rows: ["Y", "R", "S", "T", UNPAIRED_ROW],
      disabledRows: ["Y"],
      proposers: [...PRIZES],
    };
  }
  return { rows: [...PRIZES], disabledRows: [], proposers: [...AGENTS] };
}

const TRAY = "tray";

/** Click-to-pair allocation board.
 *
 * Clicking a box selects it; clicking a row (or the tray) moves the selected
 * box there. The submitted mapping covers every active row, empty rows
 * included, with boxes listed in the order they were placed.
 */
export class GuiBoard {
  readonly element: HTMLElement;
  private readonly shape: BoardShape;
  private readonly placement = new Map<string, string>();
  private selected: string | null = null;

  constructor(direction: string) {
    this.shape = boardShape(direction);
    for (const proposer of this.shape.proposers) {
      this.placement.set(proposer, TRAY);
    }
    this.element = el("div", { className: "board" });
    this.render();
  }

  submitted(): Record<string, string[]> {
    const rows: Record<string, string[]> = {};
    for (const row of this.shape.rows) {
      if (!this.shape.disabledRows.includes(row)) rows[row] = [];
    }
    for (const [proposer, where] of this.placement) {
      if (where !== TRAY) rows[where]?.push(proposer);
    }
    return rows;
  }

  private boxesIn(target: string): string[] {
    const out: string[] = [];
    for (const [proposer, where] of this.placement) {
      if (where === target) out.push(proposer);
    }
    return out;
  }

  private onBox(proposer: string): void {
    this.selected = this.selected === proposer ? null : proposer;
    this.render();
  }

  private onTarget(target: string): void {
    if (this.selected === null) return;
    // preserve placement order: re-placing moves the box to the end of the row
    this.placement.delete(this.selected);
    this.placement.set(this.selected, target);
    this.selected = null;
    this.render();
  }

  private boxButton(proposer: string): HTMLButtonElement {
    const box = button(proposer, () => this.onBox(proposer), {
      className: this.selected === proposer ? "box box-selected" : "box",
      attrs: { "data-proposer": proposer },
    });
    if (this.selected === proposer) box.setAttribute("aria-pressed", "true");
    return box;
  }

  private render(): void {
    clear(this.element);
    const tray = el("div", { className: "board-tray" });
    tray.append(
      button("Unplaced", () => this.onTarget(TRAY), {
        className: "row-target",
        attrs: { "data-row-target": TRAY },
      }),
    );
    for (const proposer of this.boxesIn(TRAY)) tray.append(this.boxButton(proposer));
    this.element.append(tray);

    for (const row of this.shape.rows) {
      const inert = this.shape.disabledRows.includes(row);
      const rowEl = el("div", {
        className: inert ? "board-row row-disabled" : "board-row",
        attrs: inert ? { "aria-disabled": "true" } : {},
      });
      const target = button(row, () => this.onTarget(row), {
        className: "row-target",
        attrs: { "data-row-target": row },
      });
      target.disabled = inert;
      rowEl.append(target);
      if (!inert) {
        for (const proposer of this.boxesIn(row)) rowEl.append(this.boxButton(proposer));
      }
      this.element.append(rowEl);
    }
  }
}
