import { ApiClient, ApiError } from "./api";
import type { GuiBoard } from "./board";
import { button, clear, el } from "./dom";
import type { RankingSelector } from "./ranking";
import { renderScreen, type ScreenActions, type ScreenCtx } from "./screens";
import type { Feedback, ResponsePayload, ScreenBody } from "./types";
import { TREATMENTS } from "./types";

/** One participant's pass through a session.
 *
 * The app holds the latest screen body from the server plus a little
 * client-only presentation state (description disclosure, outcome and reveal
 * interstitials, widget drafts). Every answer goes to the server under the
 * session's next sequence number; nothing about correctness or prizes is
 * computed here.
 */
export class App {
  readonly root: HTMLElement;
  private readonly client: ApiClient;
  private body: ScreenBody | null = null;
  private feedback: Feedback | null = null;
  private feedbackFor: string | null = null;
  private revealed: Record<string, unknown> = {};
  private disclosure = 0;
  private outcome: Feedback | null = null;
  private pendingReveal: { qid: string; reveal: unknown } | null = null;
  private readonly boards = new Map<string, GuiBoard>();
  private readonly drafts = new Map<string, unknown>();
  private readonly rankings = new Map<string, RankingSelector>();
  private error: string | null = null;
  private busy = false;

  constructor(root: HTMLElement, client: ApiClient) {
    this.root = root;
    this.client = client;
  }

  private readonly actions: ScreenActions = {
    ack: () => void this.send({ ack: true }),
    answer: (qid, answer) => void this.send({ question: qid, answer }, qid),
    ranking: (order) => void this.send({ ranking: order }),
    disclose: () => {
      this.disclosure += 1;
      this.render();
    },
    dismissOutcome: () => {
      this.outcome = null;
      this.render();
    },
    dismissReveal: () => {
      this.pendingReveal = null;
      this.render();
    },
  };

  /** Show the session launcher. */
  renderStart(): void {
    clear(this.root);
    const form = el("div", { className: "start-form" });
    form.append(el("h1", { text: "Start a session" }));
    const select = el("select", { attrs: { "data-role": "treatment" } });
    for (const t of TREATMENTS) {
      const opt = el("option", { text: t });
      opt.value = t;
      select.append(opt);
    }
    const seed = el("input", { attrs: { "data-role": "seed" } });
    seed.type = "number";
    seed.value = String(Math.floor(Math.random() * 1_000_000));
    form.append(
      el("label", {}, ["Treatment ", select]),
      el("label", {}, ["Seed ", seed]),
      button("Start", () => void this.start(select.value, Number(seed.value)), {
        className: "advance",
        attrs: { "data-action": "start" },
      }),
    );
    this.root.append(form);
  }

  async start(treatment: string, seed: number): Promise<void> {
    try {
      this.adopt(await this.client.createSession(treatment, seed));
    } catch (err) {
      this.error = describe(err);
    }
    this.render();
  }

  /** Reattach to an existing session, e.g. after a reload. */
  async resume(session: string): Promise<void> {
    try {
      this.adopt(await this.client.screen(session));
    } catch (err) {
      this.error = describe(err);
    }
    this.render();
  }

  session(): string | null {
    return this.body?.session ?? null;
  }

  private adopt(body: ScreenBody): void {
    this.body = body;
    this.error = null;
    this.resetScreenState();
  }

  private resetScreenState(): void {
    this.disclosure = 0;
    this.revealed = {};
    this.boards.clear();
    this.drafts.clear();
    this.rankings.clear();
  }

  private async send(response: ResponsePayload, qid?: string): Promise<void> {
    if (!this.body || this.busy) return;
    this.busy = true;
    try {
      const result = await this.client.submit(
        this.body.session,
        this.body.next_seq,
        response,
      );
      const previous = this.body.screen.id;
      this.body = result;
      this.error = null;
      this.feedback = result.feedback;
      this.feedbackFor = qid ?? null;
      const fb = result.feedback;
      const moved = result.screen.id !== previous;
      if (fb && fb.reveal !== null && fb.reveal !== undefined && qid) {
        if (moved) {
          this.pendingReveal = { qid, reveal: fb.reveal };
        } else {
          this.revealed[qid] = fb.reveal;
        }
      }
      if (fb && fb.prize !== null && fb.prize !== undefined) {
        this.outcome = fb;
      }
      if (moved) this.resetScreenState();
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        // The server is ahead of this view (another tab, or a replayed
        // submit); adopt its state rather than guessing.
        try {
          this.body = await this.client.screen(this.body.session);
          this.resetScreenState();
          this.error = "This page was out of date and has been refreshed.";
        } catch (refreshErr) {
          this.error = describe(refreshErr);
        }
      } else {
        this.error = describe(err);
      }
    } finally {
      this.busy = false;
      this.render();
    }
  }

  render(): void {
    if (!this.body) {
      this.renderStart();
      if (this.error) {
        this.root.prepend(el("div", { className: "error-banner", text: this.error }));
      }
      return;
    }
    const ctx: ScreenCtx = {
      body: this.body,
      feedback: this.feedback,
      feedbackFor: this.feedbackFor,
      revealed: this.revealed,
      disclosure: this.disclosure,
      outcome: this.outcome,
      pendingReveal: this.pendingReveal,
      boards: this.boards,
      drafts: this.drafts,
      rankings: this.rankings,
      error: this.error,
      actions: this.actions,
    };
    renderScreen(this.root, ctx);
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError) return err.detail;
  if (err instanceof Error) return err.message;
  return String(err);
}
