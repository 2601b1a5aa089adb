// Match view: renders the word stream and keeps all scoring server-side.
//
// The view derives everything it displays from received events; the only
// local action is freezing the stream the instant the player buzzes, which
// is what a physical buzzer does too.

import { ClientEvent, ResultEvent, ServerEvent, parseServerEvent } from "./protocol.js";

export type ViewState = "revealing" | "awaiting_answer" | "resolved" | "finished";

export interface Scoreboard {
  human: number;
  machine: number;
}

export class MatchView {
  readonly root: HTMLElement;
  private readonly send: (event: ClientEvent) => void;
  private readonly log: (message: string) => void;

  tokens: string[] = [];
  state: ViewState = "revealing";
  scoreboard: Scoreboard = { human: 0, machine: 0 };
  lastResult: ResultEvent | null = null;
  history: ResultEvent[] = [];
  buzzSent = false;
  answerSent = false;

  private streamEl!: HTMLElement;
  private scoreEl!: HTMLElement;
  private bannerEl!: HTMLElement;
  private resultEl!: HTMLElement;
  private answerBox!: HTMLInputElement;
  private statusEl!: HTMLElement;

  constructor(
    root: HTMLElement,
    send: (event: ClientEvent) => void,
    log: (message: string) => void = (m) => console.warn(m),
  ) {
    this.root = root;
    this.send = send;
    this.log = log;
    this.buildDom();
  }

  private buildDom(): void {
    this.root.innerHTML = `
      <div class="scoreboard" data-role="score">You 0 — Machine 0</div>
      <div class="status" data-role="status">Listen…</div>
      <div class="stream" data-role="stream"></div>
      <div class="banner" data-role="banner" hidden></div>
      <input class="answer" data-role="answer" hidden
             placeholder="your answer, then Enter" autocomplete="off" />
      <div class="result" data-role="result" hidden></div>
    `;
    const pick = <T extends HTMLElement>(role: string) =>
      this.root.querySelector<T>(`[data-role="${role}"]`)!;
    this.scoreEl = pick("score");
    this.statusEl = pick("status");
    this.streamEl = pick("stream");
    this.bannerEl = pick("banner");
    this.resultEl = pick("result");
    this.answerBox = pick<HTMLInputElement>("answer");
  }

  /** Number of words currently rendered; also the buzz position. */
  get revealedCount(): number {
    return this.tokens.length;
  }

  // ---- incoming events ----------------------------------------------------

  handleEvent(raw: unknown): void {
    const event = parseServerEvent(raw);
    if (event === null) {
      this.log(`ignoring malformed event: ${JSON.stringify(raw)}`);
      return;
    }
    switch (event.type) {
      case "word": {
        if (event.index !== this.tokens.length + 1) {
          this.log(`ignoring out-of-order word index ${event.index}`);
          return;
        }
        this.tokens.push(event.token);
        // tokens arrive bare; the display re-adds the trailing space
        this.streamEl.append(document.createTextNode(event.token + " "));
        break;
      }
      case "machine_buzz": {
        // interim machine guesses stay hidden until resolution
        this.showBanner(`Machine buzzed at word ${event.position}`);
        break;
      }
      case "result": {
        this.state = "resolved";
        this.lastResult = event;
        this.history.push(event);
        this.answerBox.hidden = true;
        this.answerBox.disabled = false;
        this.renderResult(event);
        this.statusEl.textContent = "Press N for the next question";
        break;
      }
      case "score": {
        this.scoreboard = { human: event.human_total, machine: event.machine_total };
        this.scoreEl.textContent =
          `You ${this.scoreboard.human} — Machine ${this.scoreboard.machine}`;
        if (event.note === "machine_incorrect") {
          this.showBanner("Machine was wrong (-5); keep listening");
        } else if (event.note === "human_incorrect") {
          this.showBanner("Not it (-5); the machine plays on");
          this.state = "revealing";
        } else if (event.note === "next_question") {
          this.resetQuestion();
        }
        break;
      }
      case "finished": {
        this.state = "finished";
        this.scoreboard = { human: event.human_score, machine: event.machine_score };
        this.scoreEl.textContent =
          `You ${this.scoreboard.human} — Machine ${this.scoreboard.machine}`;
        this.statusEl.textContent = "Match finished";
        this.showBanner(
          `Final: you ${event.human_score}, machine ${event.machine_score}`,
        );
        break;
      }
      case "error": {
        this.log(`server error event: ${event.message}`);
        break;
      }
    }
  }

  private resetQuestion(): void {
    this.tokens = [];
    this.state = "revealing";
    this.buzzSent = false;
    this.answerSent = false;
    this.streamEl.textContent = "";
    this.resultEl.hidden = true;
    this.bannerEl.hidden = true;
    this.statusEl.textContent = "Listen…";
  }

  private showBanner(text: string): void {
    this.bannerEl.hidden = false;
    this.bannerEl.textContent = text;
  }

  private renderResult(result: ResultEvent): void {
    this.resultEl.hidden = false;
    this.resultEl.innerHTML = "";
    const headline = document.createElement("div");
    headline.className = "headline";
    headline.textContent =
      `Answer: ${result.correct_answer} ` +
      `(you ${fmt(result.human_points)}, machine ${fmt(result.machine_points)})`;
    this.resultEl.append(headline);
    const list = document.createElement("ol");
    list.className = "top5";
    for (const guess of result.top5.slice(0, 5)) {
      const row = document.createElement("li");
      row.textContent = `${guess.answer} — ${(guess.prob * 100).toFixed(1)}%`;
      list.append(row);
    }
    this.resultEl.append(list);
  }

  // ---- outgoing actions ---------------------------------------------------

  /** Space bar. Sends the buzz at the number of words currently rendered. */
  buzz(): void {
    if (this.state !== "revealing" || this.buzzSent) return;
    this.buzzSent = true;
    this.state = "awaiting_answer";
    this.send({ type: "buzz", position: this.revealedCount });
    this.statusEl.textContent = `Buzzed at word ${this.revealedCount} — answer now`;
    this.answerBox.hidden = false;
    this.answerBox.focus();
  }

  /** Enter in the answer box. Empty answers never leave the client. */
  submitAnswer(text: string): void {
    if (this.state !== "awaiting_answer" || this.answerSent) return;
    const trimmed = text.trim();
    if (!trimmed) {
      this.statusEl.textContent = "Type an answer first";
      return;
    }
    this.answerSent = true;
    this.answerBox.disabled = true;
    this.send({ type: "answer", text: trimmed });
  }

  /** N key or button. Only meaningful once the question is resolved. */
  next(): void {
    if (this.state !== "resolved") return;
    this.answerSent = false;
    this.buzzSent = false;
    this.send({ type: "next" });
  }

  get answerInput(): HTMLInputElement {
    return this.answerBox;
  }

  setConnectionStatus(connected: boolean): void {
    if (!connected) {
      // rendered tokens stay; only the affordance changes
      this.statusEl.textContent = "Disconnected — press R to reconnect";
    }
  }
}

function fmt(points: number): string {
  return points >= 0 ? `+${points}` : `${points}`;
}
