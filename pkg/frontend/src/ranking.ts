import { button, clear, el } from "./dom";

/** Click-to-order ranking entry.
 *
 * Unranked prizes sit in a pool of buttons; clicking one appends it to the
 * ranked list. Clicking a ranked entry sends it back to the pool, so any
 * slip is one click to undo. The widget never reorders on its own.
 */
export class RankingSelector {
  readonly element: HTMLElement;
  private readonly prizes: string[];
  private readonly order: string[] = [];
  private readonly onChange: (order: string[]) => void;

  constructor(prizes: string[], onChange: (order: string[]) => void = () => {}) {
    this.prizes = [...prizes];
    this.onChange = onChange;
    this.element = el("div", { className: "ranking" });
    this.render();
  }

  value(): string[] {
    return [...this.order];
  }

  complete(): boolean {
    return this.order.length === this.prizes.length;
  }

  private pick(prize: string): void {
    if (!this.order.includes(prize)) this.order.push(prize);
    this.render();
    this.onChange(this.value());
  }

  private unpick(prize: string): void {
    const at = this.order.indexOf(prize);
    if (at >= 0) this.order.splice(at, 1);
    this.render();
    this.onChange(this.value());
  }

  private render(): void {
    clear(this.element);
    const pool = el("div", { className: "ranking-pool" });
    for (const prize of this.prizes) {
      const taken = this.order.includes(prize);
      const chip = button(`Prize ${prize}`, () => this.pick(prize), {
        className: "prize-chip",
        attrs: { "data-prize": prize },
      });
      chip.disabled = taken;
      pool.append(chip);
    }
    const ranked = el("ol", { className: "ranking-order" });
    this.order.forEach((prize, i) => {
      const entry = button(`${i + 1}. Prize ${prize}`, () => this.unpick(prize), {
        className: "ranked-entry",
        attrs: { "data-ranked": prize, title: "Click to remove" },
      });
      ranked.append(el("li", {}, [entry]));
    });
    this.element.append(
      el("p", { className: "hint", text: "Click prizes from best to worst." }),
      pool,
      ranked,
    );
  }
}
