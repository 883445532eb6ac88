/** Table view state: current query, selection, and the dirty-form guard. */

import { WidgetQuery, defaultQuery } from "./api.js";

export type ConfirmFn = (message: string) => boolean;

export class TableViewState {
  query: WidgetQuery = defaultQuery();
  selectedWidgetId: string | null = null;
  dirty = false;

  /** Navigation away from a dirty form requires explicit confirmation. */
  canNavigate(confirm: ConfirmFn): boolean {
    if (!this.dirty) return true;
    const ok = confirm("Discard unsaved annotation changes?");
    if (ok) this.dirty = false;
    return ok;
  }

  select(widgetId: string | null, confirm: ConfirmFn): boolean {
    if (widgetId === this.selectedWidgetId) return true;
    if (!this.canNavigate(confirm)) return false;
    this.selectedWidgetId = widgetId;
    return true;
  }

  setSearch(q: string): void {
    this.query = { ...this.query, q, offset: 0 };
  }

  setFilter(field: string, values: string[]): void {
    const filters = { ...this.query.filters };
    if (values.length === 0) delete filters[field];
    else filters[field] = values;
    this.query = { ...this.query, filters, offset: 0 };
  }

  /** Clicking the active sort column toggles direction; a new column sorts ascending. */
  toggleSort(field: string): void {
    const sortDesc = this.query.sortField === field ? !this.query.sortDesc : false;
    this.query = { ...this.query, sortField: field, sortDesc, offset: 0 };
  }

  nextPage(totalCount: number): void {
    const offset = this.query.offset + this.query.limit;
    if (offset < totalCount) this.query = { ...this.query, offset };
  }

  prevPage(): void {
    this.query = { ...this.query, offset: Math.max(0, this.query.offset - this.query.limit) };
  }

  pageLabel(totalCount: number): string {
    if (totalCount === 0) return "0 widgets";
    const first = this.query.offset + 1;
    const last = Math.min(this.query.offset + this.query.limit, totalCount);
    return `${first}–${last} of ${totalCount} widgets`;
  }
}
