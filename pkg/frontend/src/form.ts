/** Annotation form: explicit save with optimistic-concurrency versions.
 *
 * A stale expected_version surfaces as a conflict dialog showing the remote
 * row; the user may retake the remote version and retry. The form never
 * overwrites without a version check, so it cannot produce lost updates.
 */

import { Api, ApiError, WidgetRow } from "./api.js";

const TEXT_FIELDS = [
  ["app_name", "App name"],
  ["screenshot_desc", "Screenshot description"],
  ["widget_desc", "Widget description"],
  ["functionality", "Functionality"],
  ["excluded_parts", "Excluded parts"],
] as const;

const AUTOCOMPLETE_FIELDS = new Set(["app_name", "functionality"]);
const ACTIVITY_TYPES = ["", "Primary", "Peripheral", "Ambient"];

export interface FormCallbacks {
  onDirty: () => void;
  onSaved: (widgetId: string, version: number) => void;
}

export class AnnotationForm {
  private row: WidgetRow | null = null;
  private form!: HTMLFormElement;
  private versionLabel!: HTMLElement;
  private conflictDialog!: HTMLElement;

  constructor(
    private readonly container: HTMLElement,
    private readonly api: Api,
    private readonly categories: string[],
    private readonly uiTypes: string[],
    private readonly callbacks: FormCallbacks,
  ) {
    this.build();
  }

  private build(): void {
    this.container.textContent = "";
    this.form = document.createElement("form");
    this.form.setAttribute("data-testid", "annotation-form");
    this.form.addEventListener("submit", (ev) => {
      ev.preventDefault();
      void this.save();
    });

    this.versionLabel = document.createElement("div");
    this.versionLabel.className = "version-label";
    this.versionLabel.setAttribute("data-testid", "version-label");
    this.form.appendChild(this.versionLabel);

    for (const [name, label] of TEXT_FIELDS) {
      const wrap = document.createElement("label");
      wrap.textContent = label;
      const input = document.createElement("input");
      input.name = name;
      input.type = "text";
      if (AUTOCOMPLETE_FIELDS.has(name)) {
        const listId = `ac-${name}`;
        const list = document.createElement("datalist");
        list.id = listId;
        input.setAttribute("list", listId);
        input.addEventListener("input", () => void this.refreshSuggestions(input, list));
        wrap.appendChild(list);
      }
      input.addEventListener("input", () => this.markDirty());
      wrap.appendChild(input);
      this.form.appendChild(wrap);
    }

    const catWrap = document.createElement("label");
    catWrap.textContent = "Category";
    const catSelect = document.createElement("select");
    catSelect.name = "category";
    catSelect.setAttribute("data-testid", "category-picker");
    catSelect.appendChild(new Option("— choose —", ""));
    for (const c of this.categories) catSelect.appendChild(new Option(c, c));
    catSelect.addEventListener("change", () => this.markDirty());
    catWrap.appendChild(catSelect);
    this.form.appendChild(catWrap);

    const uiWrap = document.createElement("fieldset");
    uiWrap.setAttribute("data-testid", "ui-type-select");
    const legend = document.createElement("legend");
    legend.textContent = "UI types";
    uiWrap.appendChild(legend);
    for (const t of this.uiTypes) {
      const box = document.createElement("label");
      const check = document.createElement("input");
      check.type = "checkbox";
      check.name = "ui_types";
      check.value = t;
      check.addEventListener("change", () => this.markDirty());
      box.append(check, document.createTextNode(t));
      uiWrap.appendChild(box);
    }
    this.form.appendChild(uiWrap);

    const clusterWrap = document.createElement("label");
    clusterWrap.textContent = "Cluster id";
    const cluster = document.createElement("input");
    cluster.name = "cluster_id";
    cluster.type = "text";
    cluster.addEventListener("input", () => this.markDirty());
    clusterWrap.appendChild(cluster);
    this.form.appendChild(clusterWrap);

    const actWrap = document.createElement("label");
    actWrap.textContent = "Activity type";
    const act = document.createElement("select");
    act.name = "activity_type";
    for (const a of ACTIVITY_TYPES) act.appendChild(new Option(a || "—", a));
    act.addEventListener("change", () => this.markDirty());
    actWrap.appendChild(act);
    this.form.appendChild(actWrap);

    const save = document.createElement("button");
    save.type = "submit";
    save.textContent = "Save";
    save.setAttribute("data-testid", "save-button");
    this.form.appendChild(save);

    this.conflictDialog = document.createElement("div");
    this.conflictDialog.className = "conflict-dialog";
    this.conflictDialog.setAttribute("data-testid", "conflict-dialog");
    this.conflictDialog.hidden = true;

    this.container.append(this.form, this.conflictDialog);
  }

  private markDirty(): void {
    this.callbacks.onDirty();
  }

  private input(name: string): HTMLInputElement | HTMLSelectElement {
    return this.form.elements.namedItem(name) as HTMLInputElement | HTMLSelectElement;
  }

  private checkedUiTypes(): string[] {
    return Array.from(
      this.form.querySelectorAll<HTMLInputElement>('input[name="ui_types"]:checked'),
    ).map((el) => el.value);
  }

  load(row: WidgetRow): void {
    this.row = row;
    this.conflictDialog.hidden = true;
    this.versionLabel.textContent = `${row.widget_id} — version ${row.version}`;
    for (const [name] of TEXT_FIELDS) {
      (this.input(name) as HTMLInputElement).value = row[name];
    }
    this.input("category").value = row.category;
    this.input("cluster_id").value = row.cluster_id;
    this.input("activity_type").value = row.activity_type;
    for (const el of this.form.querySelectorAll<HTMLInputElement>('input[name="ui_types"]')) {
      el.checked = row.ui_types.includes(el.value);
    }
    this.clearFieldErrors();
  }

  loadedWidgetId(): string | null {
    return this.row?.widget_id ?? null;
  }

  private clearFieldErrors(): void {
    for (const el of this.form.querySelectorAll(".field-error")) el.classList.remove("field-error");
  }

  /** Validation errors are highlighted per field; returns false when invalid. */
  private validate(): boolean {
    this.clearFieldErrors();
    let ok = true;
    if (!this.input("category").value) {
      this.input("category").classList.add("field-error");
      ok = false;
    }
    if (this.checkedUiTypes().length === 0) {
      this.form.querySelector('[data-testid="ui-type-select"]')!.classList.add("field-error");
      ok = false;
    }
    return ok;
  }

  async save(): Promise<void> {
    if (!this.row || !this.validate()) return;
    const widgetId = this.row.widget_id;
    try {
      const result = await this.api.putAnnotation(widgetId, {
        expected_version: this.row.version,
        app_name: (this.input("app_name") as HTMLInputElement).value,
        screenshot_desc: (this.input("screenshot_desc") as HTMLInputElement).value,
        widget_desc: (this.input("widget_desc") as HTMLInputElement).value,
        functionality: (this.input("functionality") as HTMLInputElement).value,
        excluded_parts: (this.input("excluded_parts") as HTMLInputElement).value,
        ui_types: this.checkedUiTypes(),
        category: this.input("category").value,
        cluster_id: this.input("cluster_id").value || null,
        activity_type: this.input("activity_type").value || null,
      });
      this.row = { ...this.row, version: result.version };
      this.versionLabel.textContent = `${widgetId} — version ${result.version}`;
      this.conflictDialog.hidden = true;
      this.callbacks.onSaved(widgetId, result.version);
    } catch (err) {
      if (err instanceof ApiError && err.errorCode === "VersionConflict") {
        await this.showConflict(widgetId);
      } else {
        throw err;
      }
    }
  }

  private async showConflict(widgetId: string): Promise<void> {
    const remote = await this.api.getWidget(widgetId);
    this.conflictDialog.hidden = false;
    this.conflictDialog.textContent = "";
    const msg = document.createElement("p");
    msg.textContent = remote
      ? `Save conflict: ${widgetId} was changed elsewhere (now version ${remote.version}, ` +
        `app "${remote.app_name}", category "${remote.category}"). ` +
        "Retry to overwrite the remote value with yours."
      : `Save conflict: ${widgetId} was changed elsewhere.`;
    const retry = document.createElement("button");
    retry.type = "button";
    retry.textContent = "Retry with remote version";
    retry.setAttribute("data-testid", "conflict-retry");
    retry.addEventListener("click", () => {
      if (this.row && remote) {
        this.row = { ...this.row, version: remote.version };
        this.conflictDialog.hidden = true;
        void this.save();
      }
    });
    this.conflictDialog.append(msg, retry);
  }

  conflictVisible(): boolean {
    return !this.conflictDialog.hidden;
  }

  private async refreshSuggestions(input: HTMLInputElement, list: HTMLDataListElement): Promise<void> {
    const { values } = await this.api.suggest(input.name, input.value, 10);
    list.textContent = "";
    for (const v of values) list.appendChild(new Option(v));
  }
}
