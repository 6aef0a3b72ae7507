// Category dashboard: accepted counts, the live acquisition curves at
// thresholds 2-5, the per-iteration promotion log, and the verified-seed
// rerun button (disabled until something has been accepted). Every number
// shown is taken verbatim from a service response.

import { ApiClient, CategoryDetail, CurveData } from "./api.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const CURVE_COLORS: Record<string, string> = {
  "2": "#9467bd",
  "3": "#2ca02c",
  "4": "#d62728",
  "5": "#1f77b4",
};

export function renderCurvesSvg(data: CurveData, width = 480, height = 300): SVGSVGElement {
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("width", String(width));
  svg.setAttribute("height", String(height));
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.classList.add("curves");

  const ml = 40;
  const mb = 30;
  const plotW = width - ml - 10;
  const plotH = height - mb - 10;
  const points = Object.values(data.curves).flat();
  const xMax = Math.max(1, ...points.map(([n]) => n));
  const yMax = Math.max(1, ...points.map(([, c]) => c));
  const sx = (n: number) => ml + (plotW * n) / xMax;
  const sy = (c: number) => 10 + plotH * (1 - c / yMax);

  const axes = document.createElementNS(SVG_NS, "path");
  axes.setAttribute(
    "d",
    `M ${ml} 10 L ${ml} ${height - mb} L ${width - 10} ${height - mb}`,
  );
  axes.setAttribute("stroke", "#333");
  axes.setAttribute("fill", "none");
  svg.appendChild(axes);

  for (const threshold of ["2", "3", "4", "5"]) {
    const pts = data.curves[threshold] ?? [];
    if (pts.length === 0) continue;
    const poly = document.createElementNS(SVG_NS, "polyline");
    poly.setAttribute(
      "points",
      pts.map(([n, c]) => `${sx(n).toFixed(1)},${sy(c).toFixed(1)}`).join(" "),
    );
    poly.setAttribute("fill", "none");
    poly.setAttribute("stroke", CURVE_COLORS[threshold]);
    poly.setAttribute("stroke-width", "2");
    poly.dataset.threshold = threshold;
    svg.appendChild(poly);
  }

  const legend = document.createElementNS(SVG_NS, "text");
  legend.setAttribute("x", String(ml + 6));
  legend.setAttribute("y", "20");
  legend.setAttribute("font-size", "11");
  legend.textContent = `reviewed ${data.reviewed} · thresholds 2-5`;
  svg.appendChild(legend);
  return svg;
}

export class Dashboard {
  category: string | null = null;
  private pollTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly container: HTMLElement,
  ) {}

  async show(category: string): Promise<void> {
    this.category = category;
    const [detail, curves] = await Promise.all([
      this.api.categoryDetail(category),
      this.api.curves(category),
    ]);
    this.render(detail, curves);
  }

  async refresh(): Promise<void> {
    if (this.category) await this.show(this.category);
  }

  private render(detail: CategoryDetail, curves: CurveData): void {
    this.container.replaceChildren();

    const heading = document.createElement("h2");
    heading.textContent = detail.name;
    this.container.appendChild(heading);

    const counts = document.createElement("p");
    counts.className = "counts";
    counts.textContent =
      `${detail.candidates} candidates · ${detail.accepted} accepted · ` +
      `${detail.pending} pending · ${curves.reviewed} reviewed`;
    this.container.appendChild(counts);

    if (curves.unrated > 0) {
      const gap = document.createElement("p");
      gap.className = "gap-notice";
      gap.textContent =
        `${curves.unrated} reviewed words carry no rating; ` +
        "the curves ignore them until they are re-rated.";
      this.container.appendChild(gap);
    }

    this.container.appendChild(renderCurvesSvg(curves));

    const rerun = document.createElement("button");
    rerun.className = "rerun";
    rerun.textContent = "Re-run with accepted words as seeds";
    rerun.disabled = detail.accepted === 0;
    rerun.addEventListener("click", () => void this.triggerRerun(rerun));
    this.container.appendChild(rerun);

    const status = document.createElement("p");
    status.className = "rerun-status";
    this.container.appendChild(status);

    const log = document.createElement("section");
    log.className = "promotions";
    const logTitle = document.createElement("h3");
    logTitle.textContent = "Promotions per iteration";
    log.appendChild(logTitle);
    const list = document.createElement("ol");
    for (const entry of detail.promotions) {
      const li = document.createElement("li");
      li.textContent = entry.words.length ? entry.words.join(", ") : "(none)";
      list.appendChild(li);
    }
    log.appendChild(list);
    this.container.appendChild(log);
  }

  private async triggerRerun(button: HTMLButtonElement): Promise<void> {
    if (!this.category) return;
    const status = this.container.querySelector<HTMLElement>(".rerun-status");
    button.disabled = true;
    try {
      const { run_id } = await this.api.rerun(this.category, true);
      if (status) status.textContent = `run ${run_id} started…`;
      this.pollRun(run_id, status);
    } catch (err) {
      if (status) status.textContent = `rerun refused: ${(err as Error).message}`;
      button.disabled = false;
    }
  }

  private pollRun(runId: string, status: HTMLElement | null): void {
    const poll = async () => {
      const run = await this.api.runStatus(runId);
      if (run.status === "running") {
        this.pollTimer = setTimeout(poll, 500);
        return;
      }
      if (status) {
        status.textContent =
          run.status === "done" ? `run ${runId} finished` : `run failed: ${run.error}`;
      }
      await this.refresh();
    };
    void poll();
  }

  dispose(): void {
    if (this.pollTimer) clearTimeout(this.pollTimer);
  }
}
