// Single-page wiring: category list on the left, dashboard and the one-card
// review pane on the right. Rank-order review is the default for lexicon
// building; random order is the default for formal blind judging. The active
// session id is kept in localStorage so a reload resumes at the server cursor.

import { ApiClient, SessionInfo } from "./api.js";
import { Dashboard } from "./dashboard.js";
import { ReviewFlow } from "./review.js";

const api = new ApiClient("");

const categoriesEl = document.querySelector<HTMLElement>("#categories")!;
const dashboardEl = document.querySelector<HTMLElement>("#dashboard")!;
const reviewEl = document.querySelector<HTMLElement>("#review")!;
const controlsEl = document.querySelector<HTMLElement>("#controls")!;
const noticeEl = document.querySelector<HTMLElement>("#notice")!;

const dashboard = new Dashboard(api, dashboardEl);
let flow: ReviewFlow | null = null;
let delivered = 0;

function notify(message: string, isError = false): void {
  noticeEl.textContent = message;
  noticeEl.classList.toggle("error", isError);
}

function sessionStorageKey(category: string): string {
  return `seedlex-session:${category}`;
}

async function startSession(category: string, randomOrder: boolean): Promise<void> {
  const session = await api.createSession({ category, random_order: randomOrder });
  localStorage.setItem(sessionStorageKey(category), JSON.stringify(session));
  attachFlow(session);
}

function resumeSession(category: string): boolean {
  const raw = localStorage.getItem(sessionStorageKey(category));
  if (!raw) return false;
  try {
    attachFlow(JSON.parse(raw) as SessionInfo);
    return true;
  } catch {
    localStorage.removeItem(sessionStorageKey(category));
    return false;
  }
}

function attachFlow(session: SessionInfo): void {
  flow = new ReviewFlow(api, session, reviewEl, {
    onDelivered: () => {
      delivered += 1;
      notify(`${delivered} decisions saved`);
      if (delivered % 20 === 0) void dashboard.refresh();
    },
    onConflict: (word, message) => notify(`"${word}" refused: ${message}`, true),
    onFinished: () => {
      notify("session complete");
      localStorage.removeItem(sessionStorageKey(session.category));
      void dashboard.refresh();
    },
  });
  void flow.start();
  notify(session.random_order
    ? "blind judging: rank and score are hidden; keys 0-5 rate, a/r/d decide"
    : "review: keys 0-5 rate, a/r/d decide, arrows move");
}

function renderControls(category: string): void {
  controlsEl.replaceChildren();
  const review = document.createElement("button");
  review.textContent = "Review ranked list";
  review.addEventListener("click", () => void startSession(category, false));
  const judge = document.createElement("button");
  judge.textContent = "Blind judging (random order)";
  judge.addEventListener("click", () => void startSession(category, true));
  controlsEl.append(review, judge);
}

async function selectCategory(category: string): Promise<void> {
  await dashboard.show(category);
  renderControls(category);
  if (!resumeSession(category)) {
    reviewEl.replaceChildren();
  }
}

async function boot(): Promise<void> {
  const categories = await api.listCategories();
  categoriesEl.replaceChildren();
  for (const cat of categories) {
    const button = document.createElement("button");
    button.className = "category";
    button.textContent = `${cat.name} (${cat.accepted}/${cat.candidates})`;
    button.addEventListener("click", () => void selectCategory(cat.name));
    categoriesEl.appendChild(button);
  }
  if (categories.length > 0) {
    await selectCategory(categories[0].name);
  } else {
    notify("no rankings loaded; run a bootstrap first", true);
  }
}

document.addEventListener("keydown", (event) => {
  if (flow && !(event.target instanceof HTMLInputElement)) {
    void flow.handleKey(event);
  }
});

void boot().catch((err) => notify(`cannot reach the review service: ${err}`, true));
