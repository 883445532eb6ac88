/** Summary dashboard bound to GET /api/summary.
 *
 * Every number shown is copied verbatim from the payload; the UI computes
 * nothing itself. Bar widths are proportional to payload counts.
 */

import { DistEntryJson, SummaryPayload } from "./api.js";

function countCard(label: string, value: number, testId: string): HTMLElement {
  const card = document.createElement("div");
  card.className = "count-card";
  const num = document.createElement("div");
  num.className = "count-value";
  num.setAttribute("data-testid", testId);
  num.textContent = String(value);
  const cap = document.createElement("div");
  cap.className = "count-label";
  cap.textContent = label;
  card.append(num, cap);
  return card;
}

function barChart(
  title: string,
  entries: Record<string, DistEntryJson> | null,
  testId: string,
): HTMLElement {
  const section = document.createElement("section");
  section.className = "chart";
  section.setAttribute("data-testid", testId);
  const heading = document.createElement("h3");
  heading.textContent = title;
  section.appendChild(heading);

  const items = entries === null ? [] : Object.entries(entries);
  if (items.length === 0) {
    const zero = document.createElement("div");
    zero.className = "chart-empty";
    zero.textContent = "no data";
    section.appendChild(zero);
    return section;
  }
  const maxCount = Math.max(...items.map(([, e]) => e.count));
  for (const [label, entry] of items.sort((a, b) => b[1].count - a[1].count)) {
    const rowEl = document.createElement("div");
    rowEl.className = "bar-row";
    rowEl.setAttribute("data-label", label);
    rowEl.setAttribute("data-count", String(entry.count));
    const name = document.createElement("span");
    name.className = "bar-label";
    name.textContent = label;
    const bar = document.createElement("span");
    bar.className = "bar";
    bar.style.width = `${(entry.count / maxCount) * 100}%`;
    const value = document.createElement("span");
    value.className = "bar-value";
    value.textContent = `${entry.count} (${(entry.fraction * 100).toFixed(1)}%)`;
    rowEl.append(name, bar, value);
    section.appendChild(rowEl);
  }
  return section;
}

export function renderDashboard(container: HTMLElement, summary: SummaryPayload): void {
  container.textContent = "";

  if (summary.unannotated_count > 0) {
    const banner = document.createElement("div");
    banner.className = "warning-banner";
    banner.setAttribute("data-testid", "partial-data-banner");
    banner.textContent =
      `${summary.unannotated_count} placed widget(s) are not yet annotated; ` +
      "distributions cover the annotated subset only.";
    container.appendChild(banner);
  }

  const counts = document.createElement("div");
  counts.className = "count-grid";
  counts.append(
    countCard("widgets", summary.widget_count, "widget-count"),
    countCard("placements", summary.placement_count, "placement-count"),
    countCard("screenshots", summary.screenshot_count, "screenshot-count"),
    countCard("scenarios", summary.scenario_count, "scenario-count"),
    countCard("unannotated", summary.unannotated_count, "unannotated-count"),
  );
  container.appendChild(counts);

  container.appendChild(
    barChart("App categories", summary.category_distribution, "category-chart"),
  );
  container.appendChild(
    barChart("UI types", summary.ui_type_distribution, "ui-type-chart"),
  );

  const stats = document.createElement("dl");
  stats.className = "stat-list";
  stats.setAttribute("data-testid", "stat-list");
  const addStat = (label: string, value: unknown) => {
    const dt = document.createElement("dt");
    dt.textContent = label;
    const dd = document.createElement("dd");
    dd.textContent = value === null || value === undefined ? "—" : String(value);
    stats.append(dt, dd);
  };
  const shots = summary.screenshot_statistics as { overall_mean?: number } | null;
  const wps = summary.widgets_per_scenario as {
    mean_per_participant?: number;
    mean_per_scenario?: number;
  } | null;
  addStat("screenshots per participant (mean)", shots?.overall_mean ?? null);
  addStat("widgets per participant (mean)", wps?.mean_per_participant ?? null);
  addStat("widgets per scenario (mean)", wps?.mean_per_scenario ?? null);
  container.appendChild(stats);
}
