/** Searchable / filterable / sortable data table bound to GET /api/widgets. */

import { Api, ApiError, WidgetPage, WidgetRow } from "./api.js";
import { TableViewState } from "./state.js";

const COLUMNS: Array<{ field: string; label: string; sortable: boolean }> = [
  { field: "widget_id", label: "Widget", sortable: true },
  { field: "participant", label: "Participant", sortable: true },
  { field: "environment", label: "Environment", sortable: true },
  { field: "task", label: "Task", sortable: true },
  { field: "app_name", label: "App", sortable: true },
  { field: "category", label: "Category", sortable: true },
  { field: "functionality", label: "Functionality", sortable: true },
  { field: "ui_types", label: "UI types", sortable: false },
  { field: "version", label: "Version", sortable: true },
];

export interface TableCallbacks {
  onSelect: (row: WidgetRow) => void;
  onStateChange: () => void;
}

export class WidgetTable {
  private page: WidgetPage = { rows: [], total_count: 0 };

  constructor(
    private readonly container: HTMLElement,
    private readonly api: Api,
    private readonly state: TableViewState,
    private readonly callbacks: TableCallbacks,
  ) {}

  currentPage(): WidgetPage {
    return this.page;
  }

  async refresh(): Promise<void> {
    try {
      this.page = await this.api.getWidgets(this.state.query);
      this.render(null);
    } catch (err) {
      // API errors are surfaced inline, never swallowed
      this.render(err instanceof ApiError ? `${err.errorCode}: ${err.message}` : String(err));
    }
  }

  private render(error: string | null): void {
    this.container.textContent = "";
    if (error !== null) {
      const banner = document.createElement("div");
      banner.className = "error-banner";
      banner.setAttribute("data-testid", "table-error");
      banner.textContent = error;
      this.container.appendChild(banner);
      return;
    }

    const label = document.createElement("div");
    label.className = "page-label";
    label.setAttribute("data-testid", "page-label");
    label.textContent = this.state.pageLabel(this.page.total_count);
    this.container.appendChild(label);

    if (this.page.total_count === 0) {
      const empty = document.createElement("div");
      empty.className = "empty-state";
      empty.setAttribute("data-testid", "empty-state");
      empty.textContent = "No widgets match the current query.";
      this.container.appendChild(empty);
      return;
    }

    const table = document.createElement("table");
    table.setAttribute("data-testid", "widget-table");
    const head = table.createTHead().insertRow();
    for (const col of COLUMNS) {
      const th = document.createElement("th");
      th.textContent = col.label;
      if (col.sortable) {
        th.classList.add("sortable");
        if (this.state.query.sortField === col.field) {
          th.textContent += this.state.query.sortDesc ? " ↓" : " ↑";
        }
        th.addEventListener("click", () => {
          this.state.toggleSort(col.field);
          this.callbacks.onStateChange();
        });
      }
      head.appendChild(th);
    }

    const body = table.createTBody();
    for (const row of this.page.rows) {
      const tr = body.insertRow();
      tr.setAttribute("data-widget-id", row.widget_id);
      if (row.widget_id === this.state.selectedWidgetId) tr.classList.add("selected");
      for (const col of COLUMNS) {
        const value = row[col.field as keyof WidgetRow];
        tr.insertCell().textContent = Array.isArray(value) ? value.join(", ") : String(value);
      }
      tr.addEventListener("click", () => this.callbacks.onSelect(row));
    }
    this.container.appendChild(table);

    const nav = document.createElement("div");
    nav.className = "pager";
    const prev = document.createElement("button");
    prev.textContent = "Previous";
    prev.disabled = this.state.query.offset === 0;
    prev.addEventListener("click", () => {
      this.state.prevPage();
      this.callbacks.onStateChange();
    });
    const next = document.createElement("button");
    next.textContent = "Next";
    next.disabled = this.state.query.offset + this.state.query.limit >= this.page.total_count;
    next.addEventListener("click", () => {
      this.state.nextPage(this.page.total_count);
      this.callbacks.onStateChange();
    });
    nav.append(prev, next);
    this.container.appendChild(nav);
  }
}
