import { describe, expect, it } from "vitest";

import { SummaryPayload } from "../src/api.js";
import { renderDashboard } from "../src/dashboard.js";

const FIXTURE: SummaryPayload = {
  widget_count: 7,
  placement_count: 9,
  screenshot_count: 7,
  scenario_count: 3,
  unannotated_count: 0,
  category_distribution: {
    Music: { count: 2, fraction: 2 / 9 },
    Productivity: { count: 6, fraction: 6 / 9 },
    Utilities: { count: 1, fraction: 1 / 9 },
  },
  ui_type_distribution: {
    InformationalComponent: { count: 5, fraction: 0.5 },
    InputControl: { count: 5, fraction: 0.5 },
  },
  screenshot_statistics: { overall_mean: 2.4, overall_sd: 0.5 },
  widgets_per_scenario: { mean_per_participant: 3.0, mean_per_scenario: 3.0 },
};

const EMPTY: SummaryPayload = {
  widget_count: 0,
  placement_count: 0,
  screenshot_count: 0,
  scenario_count: 0,
  unannotated_count: 0,
  category_distribution: null,
  ui_type_distribution: null,
  screenshot_statistics: null,
  widgets_per_scenario: null,
};

function render(payload: SummaryPayload): HTMLElement {
  const host = document.createElement("div");
  renderDashboard(host, payload);
  return host;
}

function text(host: HTMLElement, testId: string): string {
  return host.querySelector(`[data-testid="${testId}"]`)!.textContent!;
}

describe("renderDashboard", () => {
  it("count cards equal the payload exactly", () => {
    const host = render(FIXTURE);
    expect(text(host, "widget-count")).toBe("7");
    expect(text(host, "placement-count")).toBe("9");
    expect(text(host, "screenshot-count")).toBe("7");
    expect(text(host, "scenario-count")).toBe("3");
    expect(text(host, "unannotated-count")).toBe("0");
  });

  it("bar rows carry payload counts and heights proportional to them", () => {
    const host = render(FIXTURE);
    const rows = Array.from(
      host.querySelectorAll('[data-testid="category-chart"] .bar-row'),
    );
    const byLabel = new Map(rows.map((r) => [r.getAttribute("data-label"), r]));
    expect(byLabel.get("Productivity")!.getAttribute("data-count")).toBe("6");
    expect(byLabel.get("Music")!.getAttribute("data-count")).toBe("2");
    expect(byLabel.get("Utilities")!.getAttribute("data-count")).toBe("1");
    // widths proportional to count / max-count
    const width = (label: string) =>
      parseFloat((byLabel.get(label)!.querySelector(".bar") as HTMLElement).style.width);
    expect(width("Productivity")).toBeCloseTo(100);
    expect(width("Music")).toBeCloseTo((2 / 6) * 100);
  });

  it("largest category renders first", () => {
    const host = render(FIXTURE);
    const first = host.querySelector('[data-testid="category-chart"] .bar-row')!;
    expect(first.getAttribute("data-label")).toBe("Productivity");
  });

  it("empty dataset renders zeroed charts and no banner", () => {
    const host = render(EMPTY);
    expect(text(host, "widget-count")).toBe("0");
    expect(host.querySelector('[data-testid="partial-data-banner"]')).toBeNull();
    expect(
      host.querySelector('[data-testid="category-chart"] .chart-empty'),
    ).not.toBeNull();
    expect(host.querySelectorAll(".bar-row")).toHaveLength(0);
  });

  it("partial-data banner appears when unannotated_count > 0", () => {
    const host = render({ ...FIXTURE, unannotated_count: 4 });
    expect(text(host, "partial-data-banner")).toContain("4");
  });
});
