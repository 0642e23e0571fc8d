import { GuiBoard } from "./board";
import { button, clear, el, money } from "./dom";
import { renderQuestions, revealView } from "./questions";
import { RankingSelector } from "./ranking";
import type {
  EndSummary,
  Feedback,
  QuestionView,
  ScenarioView,
  ScreenBody,
} from "./types";
import { PRIZES } from "./types";

export interface ScreenActions {
  ack(): void;
  answer(qid: string, answer: unknown): void;
  ranking(order: string[]): void;
  disclose(): void;
  dismissOutcome(): void;
  dismissReveal(): void;
}

export interface ScreenCtx {
  body: ScreenBody;
  feedback: Feedback | null;
  feedbackFor: string | null;
  revealed: Record<string, unknown>;
  /** Paragraphs shown so far on a description screen (client state only). */
  disclosure: number;
  /** Round outcome waiting to be acknowledged before the next screen shows. */
  outcome: Feedback | null;
  /** A revealed answer whose screen already advanced; shown until dismissed. */
  pendingReveal: { qid: string; reveal: unknown } | null;
  boards: Map<string, GuiBoard>;
  drafts: Map<string, unknown>;
  rankings: Map<string, RankingSelector>;
  error: string | null;
  actions: ScreenActions;
}

export function renderScreen(root: HTMLElement, ctx: ScreenCtx): void {
  clear(root);
  const screen = ctx.body.screen;
  root.setAttribute("data-screen-id", screen.id);
  root.setAttribute("data-screen-kind", screen.kind);
  if (ctx.error) {
    root.append(el("div", { className: "error-banner", text: ctx.error }));
  }
  if (ctx.outcome) {
    root.append(outcomeView(ctx));
    return;
  }
  if (ctx.pendingReveal) {
    root.append(pendingRevealView(ctx));
    return;
  }
  switch (screen.kind) {
    case "consent":
      renderConsent(root, ctx);
      break;
    case "null-description":
    case "treatment-description":
      renderDescription(root, ctx);
      break;
    case "null-training":
    case "training-round":
      renderTraining(root, ctx);
      break;
    case "real-round":
      renderRealRound(root, ctx);
      break;
    case "spu-screen":
    case "exit":
      renderQuestionScreen(root, ctx);
      break;
    case "end":
      renderEnd(root, ctx);
      break;
    default:
      root.append(el("p", { text: "Please wait." }));
  }
}

function renderConsent(root: HTMLElement, ctx: ScreenCtx): void {
  root.append(el("h1", { text: "Welcome" }));
  root.append(el("p", { text: String(ctx.body.screen.payload.text ?? "") }));
  root.append(
    button("I agree", () => ctx.actions.ack(), {
      className: "advance",
      attrs: { "data-action": "advance" },
    }),
  );
}

/** Description pages reveal one paragraph per click so nobody skips the whole
 * block with a single reflexive press. Only the final click talks to the
 * server. */
function renderDescription(root: HTMLElement, ctx: ScreenCtx): void {
  const paragraphs = (ctx.body.screen.payload.paragraphs as string[]) ?? [];
  const shown = Math.min(ctx.disclosure + 1, paragraphs.length);
  root.append(el("h1", { text: "How your prize is decided" }));
  for (const text of paragraphs.slice(0, shown)) {
    root.append(el("p", { className: "description-para", text }));
  }
  const last = shown >= paragraphs.length;
  root.append(
    el("p", {
      className: "disclosure-progress",
      text: `${shown} of ${paragraphs.length}`,
    }),
  );
  root.append(
    button("Continue", () => (last ? ctx.actions.ack() : ctx.actions.disclose()), {
      className: "advance",
      attrs: { "data-action": "advance" },
    }),
  );
}

function renderTraining(root: HTMLElement, ctx: ScreenCtx): void {
  const payload = ctx.body.screen.payload;
  const round = payload.round as number | undefined;
  root.append(
    el("h1", { text: round ? `Practice round ${round}` : "Practice" }),
  );
  const scenario = payload.scenario as ScenarioView | undefined;
  if (scenario) root.append(scenarioView(scenario));
  const reminder = payload.reminder as string[] | undefined;
  if (reminder) root.append(reminderView(reminder));
  const questions = (payload.questions as QuestionView[]) ?? [];
  renderQuestions(root, questions, questionCtx(ctx));
  maybeContinue(root, ctx, questions);
}

function renderRealRound(root: HTMLElement, ctx: ScreenCtx): void {
  const payload = ctx.body.screen.payload;
  const currency = String(payload.currency ?? "");
  root.append(el("h1", { text: `Round ${payload.round} of 10` }));
  root.append(
    el("p", {
      className: "earnings",
      attrs: { "data-role": "cumulative" },
      text: `Earnings so far: ${money(Number(payload.cumulative_earnings ?? 0), currency)}`,
    }),
  );
  const values = (payload.values as Record<string, number>) ?? {};
  root.append(valuesTable(values, currency));
  const priorities = payload.priorities as Record<string, string[]> | undefined;
  if (priorities) root.append(prioritiesTable(priorities));
  const reminder = payload.reminder as string[] | undefined;
  if (reminder) root.append(reminderView(reminder));

  const key = ctx.body.screen.id;
  let selector = ctx.rankings.get(key);
  if (!selector) {
    selector = new RankingSelector([...PRIZES]);
    ctx.rankings.set(key, selector);
  }
  root.append(el("h2", { text: "Your ranking" }));
  root.append(selector.element);
  const chosen = selector;
  const submit = button(
    "Submit ranking",
    () => {
      if (chosen.complete()) ctx.actions.ranking(chosen.value());
    },
    { className: "submit", attrs: { "data-action": "submit-ranking" } },
  );
  root.append(submit);
}

function outcomeView(ctx: ScreenCtx): HTMLElement {
  const fb = ctx.outcome as Feedback;
  const wrap = el("div", { className: "outcome", attrs: { "data-role": "outcome" } });
  wrap.append(el("h1", { text: `You received Prize ${fb.prize ?? "?"}` }));
  if (fb.earned !== null && fb.earned !== undefined) {
    wrap.append(el("p", { text: `You earned $${fb.earned} this round.` }));
  }
  if (fb.cumulative_earnings !== null && fb.cumulative_earnings !== undefined) {
    wrap.append(
      el("p", {
        attrs: { "data-role": "cumulative" },
        text: `Earnings so far: $${fb.cumulative_earnings}`,
      }),
    );
  }
  wrap.append(
    button("Continue", () => ctx.actions.dismissOutcome(), {
      className: "advance",
      attrs: { "data-action": "advance" },
    }),
  );
  return wrap;
}

function pendingRevealView(ctx: ScreenCtx): HTMLElement {
  const pending = ctx.pendingReveal as { qid: string; reveal: unknown };
  const wrap = el("div", {
    className: "reveal-panel",
    attrs: { "data-reveal-for": pending.qid },
  });
  wrap.append(el("p", { text: "That was the last attempt. The correct answer was:" }));
  wrap.append(revealView(pending.reveal));
  wrap.append(
    button("Continue", () => ctx.actions.dismissReveal(), {
      className: "advance",
      attrs: { "data-action": "advance" },
    }),
  );
  return wrap;
}

function renderQuestionScreen(root: HTMLElement, ctx: ScreenCtx): void {
  const heading = ctx.body.screen.kind === "exit" ? "A few final questions" : "Quiz";
  root.append(el("h1", { text: heading }));
  const questions = (ctx.body.screen.payload.questions as QuestionView[]) ?? [];
  renderQuestions(root, questions, questionCtx(ctx));
}

function renderEnd(root: HTMLElement, ctx: ScreenCtx): void {
  const summary = ctx.body.screen.payload.summary as EndSummary | undefined;
  root.append(el("h1", { text: "All done" }));
  if (!summary) return;
  const c = summary.currency;
  const rows: [string, string][] = [
    ["Quiz points", `${summary.points_earned} of ${summary.points_max}`],
    ["Quiz bonus", money(summary.bonus, c)],
    ["Round earnings", money(summary.round_earnings, c)],
    ["Total", money(summary.total, c)],
  ];
  const table = el("table", { className: "summary" });
  for (const [label, value] of rows) {
    table.append(el("tr", {}, [el("th", { text: label }), el("td", { text: value })]));
  }
  root.append(table);
  root.append(el("p", { text: "Thank you for taking part. You can close this window." }));
}

function questionCtx(ctx: ScreenCtx) {
  return {
    feedbackFor: ctx.feedbackFor,
    feedback: ctx.feedback,
    revealed: ctx.revealed,
    boards: ctx.boards,
    drafts: ctx.drafts,
    submit: (qid: string, answer: unknown) => ctx.actions.answer(qid, answer),
  };
}

/** Screens whose payload lists no open questions still need an explicit step
 * forward; training pages that are all questions advance on their own. */
function maybeContinue(
  root: HTMLElement,
  ctx: ScreenCtx,
  questions: QuestionView[],
): void {
  if (questions.length === 0) {
    root.append(
      button("Continue", () => ctx.actions.ack(), {
        className: "advance",
        attrs: { "data-action": "advance" },
      }),
    );
  }
}

function scenarioView(scenario: ScenarioView): HTMLElement {
  const wrap = el("div", { className: "scenario" });
  wrap.append(el("h2", { text: "This round's submissions" }));
  wrap.append(
    listTable("Submitted rankings (best first)", scenario.rankings),
    listTable("Prize priorities (highest first)", scenario.priorities),
  );
  const values = el("table", { className: "values" });
  const head = el("tr", {}, [el("th", { text: "Prize" }), el("th", { text: "Value to you" })]);
  values.append(head);
  for (const prize of Object.keys(scenario.values)) {
    values.append(
      el("tr", {}, [
        el("th", { text: prize }),
        el("td", { text: `$${scenario.values[prize]}` }),
      ]),
    );
  }
  const caption = el("caption", { text: "Prize values" });
  values.prepend(caption);
  wrap.append(values);
  return wrap;
}

function listTable(title: string, columns: Record<string, string[]>): HTMLElement {
  const names = Object.keys(columns);
  const depth = Math.max(0, ...names.map((n) => columns[n]?.length ?? 0));
  const table = el("table", { className: "ranking-table" });
  table.append(el("caption", { text: title }));
  table.append(el("tr", {}, names.map((n) => el("th", { text: n }))));
  for (let i = 0; i < depth; i++) {
    table.append(
      el("tr", {}, names.map((n) => el("td", { text: columns[n]?.[i] ?? "" }))),
    );
  }
  return table;
}

function valuesTable(values: Record<string, number>, currency: string): HTMLElement {
  const table = el("table", { className: "values" });
  table.append(el("caption", { text: "What each prize is worth to you" }));
  table.append(
    el("tr", {}, [el("th", { text: "Prize" }), el("th", { text: "Value" })]),
  );
  for (const prize of [...PRIZES]) {
    if (!(prize in values)) continue;
    table.append(
      el("tr", {}, [
        el("th", { text: prize }),
        el("td", { text: money(values[prize] ?? 0, currency) }),
      ]),
    );
  }
  return table;
}

function prioritiesTable(priorities: Record<string, string[]>): HTMLElement {
  return listTable("Prize priorities (highest first)", priorities);
}

function reminderView(paragraphs: string[]): HTMLElement {
  const details = el("details", { className: "reminder" });
  details.append(el("summary", { text: "Reminder: how your prize is decided" }));
  for (const text of paragraphs) {
    details.append(el("p", { text }));
  }
  return details;
}
