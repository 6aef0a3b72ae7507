// Candidate card rendering. A card only ever shows fields the service sent;
// in random-order (blind judging) sessions the service omits rank and score
// and the renderer must never invent or leak them.

import { CandidateCard, DecisionState } from "./api.js";

export function decisionLabel(d: DecisionState | null): string {
  if (!d) return "undecided";
  return d.rating != null ? `${d.verdict} (${d.rating})` : d.verdict;
}

export function renderCard(card: CandidateCard, showRank: boolean): HTMLElement {
  const el = document.createElement("article");
  el.className = "card";
  el.dataset.word = card.word;

  const header = document.createElement("header");
  const title = document.createElement("h2");
  title.textContent = card.display;
  header.appendChild(title);

  if (showRank && card.rank != null) {
    const rank = document.createElement("span");
    rank.className = "rank";
    rank.textContent = `#${card.rank}`;
    header.appendChild(rank);
  }
  el.appendChild(header);

  const stats = document.createElement("p");
  stats.className = "stats";
  const bits = [
    `${card.window_count} window hits`,
    `${card.corpus_freq} corpus occurrences`,
  ];
  if (showRank && card.score != null) {
    bits.push(`score ${card.score}`);
  }
  stats.textContent = bits.join(" · ");
  el.appendChild(stats);

  const state = document.createElement("p");
  state.className = "decision";
  state.textContent = decisionLabel(card.decision);
  el.appendChild(state);

  const examples = document.createElement("ul");
  examples.className = "examples";
  for (const sentence of card.examples.slice(0, 5)) {
    const li = document.createElement("li");
    li.textContent = sentence;
    examples.appendChild(li);
  }
  el.appendChild(examples);

  return el;
}

export function setCardDecision(el: HTMLElement, d: DecisionState | null): void {
  const state = el.querySelector(".decision");
  if (state) state.textContent = decisionLabel(d);
  el.classList.toggle("decided", d != null);
}
