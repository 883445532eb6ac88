/** Console bootstrap: tabs + wiring between table, form, dashboard, viewer. */

import { Api, WidgetRow } from "./api.js";
import { renderDashboard } from "./dashboard.js";
import { AnnotationForm } from "./form.js";
import { TableViewState } from "./state.js";
import { WidgetTable } from "./table.js";
import { LayoutViewer } from "./viewer.js";

const TABS = ["table", "dashboard", "viewer"] as const;
type Tab = (typeof TABS)[number];

async function boot(): Promise<void> {
  const api = new Api("");
  const state = new TableViewState();
  const root = document.getElementById("app")!;

  root.innerHTML = `
    <nav id="tabs"></nav>
    <div id="tab-table" class="tab">
      <input id="search" type="search" placeholder="Search annotations…">
      <div id="table-host"></div>
      <div id="form-host"></div>
    </div>
    <div id="tab-dashboard" class="tab" hidden></div>
    <div id="tab-viewer" class="tab" hidden></div>
  `;

  const { categories, ui_types } = await api.getCategories();

  const table = new WidgetTable(document.getElementById("table-host")!, api, state, {
    onSelect: (row: WidgetRow) => {
      if (state.select(row.widget_id, (m) => window.confirm(m))) {
        form.load(row);
        void table.refresh();
      }
    },
    onStateChange: () => void table.refresh(),
  });

  const form = new AnnotationForm(
    document.getElementById("form-host")!,
    api,
    categories,
    ui_types,
    {
      onDirty: () => {
        state.dirty = true;
      },
      onSaved: () => {
        state.dirty = false;
        void table.refresh();
      },
    },
  );

  const viewer = new LayoutViewer(document.getElementById("tab-viewer")!, api, {
    onSelectWidget: (widgetId) => {
      state.setFilter("widget_id", [widgetId]);
      void showTab("table");
    },
  });

  const nav = document.getElementById("tabs")!;
  for (const tab of TABS) {
    const button = document.createElement("button");
    button.textContent = tab;
    button.addEventListener("click", () => void showTab(tab));
    nav.appendChild(button);
  }

  async function showTab(tab: Tab): Promise<void> {
    if (!state.canNavigate((m) => window.confirm(m))) return;
    for (const t of TABS) {
      document.getElementById(`tab-${t}`)!.hidden = t !== tab;
    }
    if (tab === "table") await table.refresh();
    if (tab === "dashboard") {
      renderDashboard(document.getElementById("tab-dashboard")!, await api.getSummary());
    }
    if (tab === "viewer") await viewer.showScenarioList();
  }

  const search = document.getElementById("search") as HTMLInputElement;
  search.addEventListener("change", () => {
    state.setSearch(search.value);
    void table.refresh();
  });

  await showTab("table");
}

void boot();
