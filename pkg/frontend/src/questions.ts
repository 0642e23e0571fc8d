import { GuiBoard } from "./board";
import { button, el } from "./dom";
import type { Feedback, QuestionView } from "./types";

export interface QuestionCtx {
  /** Question id the latest feedback belongs to, if any. */
  feedbackFor: string | null;
  feedback: Feedback | null;
  /** Revealed canonical answers, kept until the screen changes. */
  revealed: Record<string, unknown>;
  /** Live widget state that should survive re-renders within a screen. */
  boards: Map<string, GuiBoard>;
  drafts: Map<string, unknown>;
  submit: (qid: string, answer: unknown) => void;
}

const OPTION_KINDS = new Set([
  "tf",
  "mc",
  "counterfactual",
  "existential",
  "practical",
  "attention",
]);

export function renderQuestions(
  container: HTMLElement,
  questions: QuestionView[],
  ctx: QuestionCtx,
): void {
  for (const q of questions) {
    container.append(questionCard(q, ctx));
  }
}

function questionCard(q: QuestionView, ctx: QuestionCtx): HTMLElement {
  const card = el("section", {
    className: q.resolved ? "question question-resolved" : "question",
    attrs: { "data-qid": q.id },
  });
  card.append(el("p", { className: "prompt", text: q.prompt }));
  card.append(attemptLine(q));

  if (!q.resolved) {
    card.append(widget(q, ctx));
  }

  if (ctx.feedbackFor === q.id && ctx.feedback) {
    card.append(feedbackLine(q, ctx.feedback));
  }
  const revealed = ctx.revealed[q.id];
  if (revealed !== undefined) {
    const panel = el("div", {
      className: "reveal-panel",
      attrs: { "data-reveal-for": q.id },
    });
    panel.append(el("p", { text: "The correct answer was:" }));
    panel.append(revealView(revealed));
    card.append(panel);
  }
  return card;
}

function attemptLine(q: QuestionView): HTMLElement {
  let text: string;
  if (q.resolved) {
    text = "Answered.";
  } else if (q.attempts === "three-reveal") {
    text = `Attempt ${q.attempts_used + 1} of 3`;
  } else if (q.attempts === "until-correct") {
    text = `Attempt ${q.attempts_used + 1}`;
  } else {
    text = "One attempt.";
  }
  const points = q.points > 0 ? ` Worth ${q.points} point${q.points === 1 ? "" : "s"}.` : "";
  return el("p", { className: "attempt-line", text: text + points });
}

function widget(q: QuestionView, ctx: QuestionCtx): HTMLElement {
  if (q.kind === "gui-step" || q.kind === "gui-full") return boardWidget(q, ctx);
  if (q.kind === "menu-select") return menuWidget(q, ctx);
  if (OPTION_KINDS.has(q.kind) && q.options.length > 0) return optionWidget(q, ctx);
  if (q.options.length > 0) return optionWidget(q, ctx);
  return textWidget(q, ctx);
}

function optionWidget(q: QuestionView, ctx: QuestionCtx): HTMLElement {
  const box = el("div", { className: "options" });
  for (const option of q.options) {
    box.append(
      button(option, () => ctx.submit(q.id, option), {
        className: "option",
        attrs: { "data-option": option },
      }),
    );
  }
  return box;
}

function menuWidget(q: QuestionView, ctx: QuestionCtx): HTMLElement {
  const picked = new Set((ctx.drafts.get(q.id) as string[] | undefined) ?? []);
  const box = el("div", { className: "menu-select" });
  for (const option of q.options) {
    const input = el("input");
    input.type = "checkbox";
    input.value = option;
    input.checked = picked.has(option);
    input.setAttribute("data-menu-option", option);
    // "click" rather than "change": the box is already toggled when it fires,
    // and it is delivered consistently wherever the click originated
    input.addEventListener("click", () => {
      if (input.checked) picked.add(option);
      else picked.delete(option);
      ctx.drafts.set(q.id, q.options.filter((o) => picked.has(o)));
    });
    box.append(el("label", {}, [input, ` Prize ${option}`]));
  }
  box.append(
    button(
      "Submit selection",
      () => ctx.submit(q.id, q.options.filter((o) => picked.has(o))),
      { className: "submit", attrs: { "data-action": "submit-menu" } },
    ),
  );
  return box;
}

function boardWidget(q: QuestionView, ctx: QuestionCtx): HTMLElement {
  const direction = String(q.payload?.direction ?? "participant-proposing");
  let board = ctx.boards.get(q.id);
  if (!board) {
    board = new GuiBoard(direction);
    ctx.boards.set(q.id, board);
  }
  const wrap = el("div", { className: "board-widget" });
  wrap.append(board.element);
  const submitBoard = board;
  wrap.append(
    button("Submit board", () => ctx.submit(q.id, submitBoard.submitted()), {
      className: "submit",
      attrs: { "data-action": "submit-board" },
    }),
  );
  return wrap;
}

function textWidget(q: QuestionView, ctx: QuestionCtx): HTMLElement {
  const long = q.kind === "demographics";
  const wrap = el("div", { className: "text-answer" });
  const input = long ? el("textarea") : el("input");
  if (input instanceof HTMLInputElement) {
    input.type = "text";
    if (q.kind === "cognitive") input.inputMode = "numeric";
  }
  input.value = String(ctx.drafts.get(q.id) ?? "");
  input.setAttribute("data-answer-input", q.id);
  input.addEventListener("input", () => ctx.drafts.set(q.id, input.value));
  wrap.append(input);
  wrap.append(
    button("Submit answer", () => ctx.submit(q.id, input.value.trim()), {
      className: "submit",
      attrs: { "data-action": "submit-text" },
    }),
  );
  return wrap;
}

function feedbackLine(q: QuestionView, fb: Feedback): HTMLElement {
  let text: string;
  let cls: string;
  if (fb.correct) {
    text = fb.points > 0 ? `Correct. +${fb.points} points.` : "Correct.";
    cls = "feedback feedback-correct";
  } else if (q.resolved) {
    text = "Incorrect.";
    cls = "feedback feedback-wrong";
  } else {
    text = "Not quite. Try again.";
    cls = "feedback feedback-wrong";
  }
  return el("p", { className: cls, text });
}

export function revealView(revealed: unknown): HTMLElement {
  if (Array.isArray(revealed)) {
    return el("p", { className: "reveal-text", text: revealed.join(", ") });
  }
  if (revealed !== null && typeof revealed === "object") {
    const list = el("dl", { className: "reveal-board" });
    for (const [row, boxes] of Object.entries(revealed as Record<string, unknown>)) {
      list.append(el("dt", { text: row }));
      const text = Array.isArray(boxes) ? boxes.join(" ") : String(boxes);
      list.append(el("dd", { text: text || "(empty)" }));
    }
    return list;
  }
  return el("p", { className: "reveal-text", text: String(revealed) });
}
