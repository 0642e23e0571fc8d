import { describe, expect, it } from "vitest";

import { boardShape, GuiBoard } from "../src/board";

function press(board: GuiBoard, selector: string): void {
  const node = board.element.querySelector<HTMLButtonElement>(selector);
  if (!node) throw new Error(`missing ${selector}`);
  node.click();
}

function place(board: GuiBoard, proposer: string, row: string): void {
  press(board, `[data-proposer="${proposer}"]`);
  press(board, `[data-row-target="${row}"]`);
}

describe("boardShape", () => {
  it("uses prize rows when participants propose", () => {
    const shape = boardShape("participant-proposing");
    expect(shape.rows).toEqual(["A", "B", "C", "D"]);
    expect(shape.proposers).toEqual(["Y", "R", "S", "T"]);
    expect(shape.disabledRows).toEqual([]);
  });

  it("uses participant rows plus the unpaired row when prizes propose", () => {
    const shape = boardShape("prize-proposing-excluding");
    expect(shape.rows).toEqual(["Y", "R", "S", "T", "U.P."]);
    expect(shape.proposers).toEqual(["A", "B", "C", "D"]);
    expect(shape.disabledRows).toEqual(["Y"]);
  });
});

describe("GuiBoard", () => {
  it("assigns a selected box to a clicked row", () => {
    const board = new GuiBoard("participant-proposing");
    place(board, "Y", "C");
    place(board, "R", "C");
    expect(board.submitted()).toEqual({ A: [], B: [], C: ["Y", "R"], D: [] });
  });

  it("keeps placement order, moving a re-placed box to the end", () => {
    const board = new GuiBoard("participant-proposing");
    place(board, "Y", "A");
    place(board, "R", "A");
    place(board, "Y", "A");
    expect(board.submitted().A).toEqual(["R", "Y"]);
  });

  it("moves boxes between rows and back to the tray", () => {
    const board = new GuiBoard("participant-proposing");
    place(board, "S", "B");
    place(board, "S", "D");
    expect(board.submitted()).toEqual({ A: [], B: [], C: [], D: ["S"] });
    place(board, "S", "tray");
    expect(board.submitted()).toEqual({ A: [], B: [], C: [], D: [] });
  });

  it("ignores row clicks when nothing is selected", () => {
    const board = new GuiBoard("participant-proposing");
    press(board, '[data-row-target="B"]');
    expect(board.submitted()).toEqual({ A: [], B: [], C: [], D: [] });
  });

  it("marks the selected box and deselects on a second click", () => {
    const board = new GuiBoard("participant-proposing");
    press(board, '[data-proposer="T"]');
    expect(
      board.element
        .querySelector('[data-proposer="T"]')
        ?.getAttribute("aria-pressed"),
    ).toBe("true");
    press(board, '[data-proposer="T"]');
    expect(
      board.element.querySelector('[data-proposer="T"]')?.getAttribute("aria-pressed"),
    ).toBeNull();
  });

  it("shows the participant's row grayed and inert when prizes propose", () => {
    const board = new GuiBoard("prize-proposing-excluding");
    const target = board.element.querySelector<HTMLButtonElement>(
      '[data-row-target="Y"]',
    );
    expect(target?.disabled).toBe(true);
    expect(
      board.element.querySelector(".row-disabled")?.getAttribute("aria-disabled"),
    ).toBe("true");
    // a selected prize cannot land there
    press(board, '[data-proposer="A"]');
    target?.click();
    expect(board.submitted()).toEqual({ R: [], S: [], T: [], "U.P.": [] });
  });

  it("collects exhausted prizes in the unpaired row", () => {
    const board = new GuiBoard("prize-proposing-excluding");
    place(board, "A", "R");
    place(board, "C", "U.P.");
    expect(board.submitted()).toEqual({ R: ["A"], S: [], T: [], "U.P.": ["C"] });
  });

  it("is built from buttons so keyboard users can drive it", () => {
    const board = new GuiBoard("prize-proposing-excluding");
    const interactive = board.element.querySelectorAll(
      "[data-proposer], [data-row-target]",
    );
    expect(interactive.length).toBeGreaterThan(0);
    for (const node of interactive) {
      expect(node.tagName).toBe("BUTTON");
    }
  });
});
