// The review flow: one card at a time, keyboard-first. Keys 1-5 rate the
// current word (3 and up accepts it, 1-2 rejects it, carrying the rating),
// 0 defers an unknown word, and a/r/d force a verdict. Decisions render
// optimistically and roll back if the server rejects them. The service owns
// the session cursor, so reloading the page and re-attaching to the same
// session resumes exactly where it stopped.

import { ApiClient, ApiError, CandidateCard, DecisionState, SessionInfo } from "./api.js";
import { renderCard, setCardDecision } from "./cards.js";
import { DecisionQueue } from "./queue.js";

export interface ReviewCallbacks {
  onDelivered?: (word: string) => void;
  onConflict?: (word: string, message: string) => void;
  onFinished?: () => void;
}

export class ReviewFlow {
  readonly cards: CandidateCard[] = [];
  position = 0;
  exhausted = false;
  readonly queue: DecisionQueue;
  private readonly previous = new Map<string, DecisionState | null>();

  constructor(
    private readonly api: ApiClient,
    readonly session: SessionInfo,
    private readonly container: HTMLElement | null,
    private readonly callbacks: ReviewCallbacks = {},
    private readonly pageSize = 20,
    retryDelayMs = 1000,
  ) {
    this.queue = new DecisionQueue(
      api,
      {
        onDelivered: (d) => this.callbacks.onDelivered?.(d.word),
        onRejected: (d, err) => this.rollback(d.word, err),
      },
      retryDelayMs,
    );
  }

  get showRank(): boolean {
    return !this.session.random_order;
  }

  current(): CandidateCard | null {
    return this.cards[this.position] ?? null;
  }

  async start(): Promise<void> {
    await this.ensureLoaded();
    this.render();
  }

  private async ensureLoaded(): Promise<void> {
    while (this.position >= this.cards.length && !this.exhausted) {
      const page = await this.api.nextCandidates(this.session.session_id, this.pageSize);
      this.cards.push(...page.words);
      if (page.done) this.exhausted = true;
      if (page.words.length === 0) break;
    }
  }

  /** Rate the current card: 3-5 accept, 1-2 reject, 0 defer (unknown word). */
  async rate(value: number): Promise<void> {
    if (value < 0 || value > 5) return;
    if (value === 0) return this.decide("defer", null);
    return this.decide(value >= 3 ? "accept" : "reject", value);
  }

  async decide(
    verdict: "accept" | "reject" | "defer",
    rating: number | null,
  ): Promise<void> {
    const card = this.current();
    if (!card) return;
    this.previous.set(card.word, card.decision);
    card.decision = { verdict, rating };
    this.queue.submit({
      sessionId: this.session.session_id,
      word: card.word,
      verdict,
      rating,
    });
    await this.advance();
  }

  private rollback(word: string, error: ApiError): void {
    const card = this.cards.find((c) => c.word === word);
    if (card) {
      card.decision = this.previous.get(word) ?? null;
    }
    this.callbacks.onConflict?.(word, error.message);
    this.render();
  }

  async advance(): Promise<void> {
    this.position += 1;
    await this.ensureLoaded();
    if (this.position >= this.cards.length && this.exhausted) {
      this.callbacks.onFinished?.();
    }
    this.render();
  }

  back(): void {
    if (this.position > 0) {
      this.position -= 1;
      this.render();
    }
  }

  async handleKey(event: KeyboardEvent): Promise<void> {
    if (event.key >= "0" && event.key <= "5") {
      await this.rate(Number(event.key));
    } else if (event.key === "a") {
      await this.decide("accept", this.current()?.decision?.rating ?? 5);
    } else if (event.key === "r") {
      await this.decide("reject", this.current()?.decision?.rating ?? null);
    } else if (event.key === "d") {
      await this.decide("defer", null);
    } else if (event.key === "ArrowLeft") {
      this.back();
    } else if (event.key === "ArrowRight") {
      await this.advance();
    }
  }

  render(): void {
    if (!this.container) return;
    this.container.replaceChildren();
    const card = this.current();
    if (!card) {
      const doneMsg = document.createElement("p");
      doneMsg.className = "review-done";
      doneMsg.textContent = this.exhausted
        ? "Session complete. Every candidate has been presented."
        : "Loading…";
      this.container.appendChild(doneMsg);
      return;
    }
    const el = renderCard(card, this.showRank);
    setCardDecision(el, card.decision);
    this.container.appendChild(el);

    const progress = document.createElement("p");
    progress.className = "progress";
    progress.textContent = `${this.position + 1} of ${this.session.size}`;
    this.container.appendChild(progress);
  }
}
