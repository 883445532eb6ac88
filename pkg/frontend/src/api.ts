/** Typed client for the annotation console HTTP API. */

export interface WidgetQuery {
  q: string;
  filters: Record<string, string[]>;
  sortField: string;
  sortDesc: boolean;
  offset: number;
  limit: number;
}

export interface WidgetRow {
  widget_id: string;
  participant: string;
  environment: string;
  task: string;
  screenshot_id: string;
  app_name: string;
  screenshot_desc: string;
  widget_desc: string;
  functionality: string;
  excluded_parts: string;
  ui_types: string[];
  category: string;
  cluster_id: string;
  activity_type: string;
  version: number;
}

export interface WidgetPage {
  rows: WidgetRow[];
  total_count: number;
}

export interface DistEntryJson {
  count: number;
  fraction: number;
}

export interface SummaryPayload {
  widget_count: number;
  placement_count: number;
  screenshot_count: number;
  scenario_count: number;
  unannotated_count: number;
  category_distribution: Record<string, DistEntryJson> | null;
  ui_type_distribution: Record<string, DistEntryJson> | null;
  screenshot_statistics: Record<string, unknown> | null;
  widgets_per_scenario: Record<string, unknown> | null;
}

export interface ScenarioInfo {
  participant_id: string;
  environment: string;
  task: string;
  max_seq: number;
}

export interface SceneWidget {
  widget_id: string;
  pose: { position: [number, number, number]; orientation: [number, number, number, number] };
  quad_width_m: number;
  quad_height_m: number;
}

export interface ScenePayload {
  scenario: { participant_id: string; environment: string; task: string };
  as_of_seq: number;
  widgets: SceneWidget[];
}

export interface AnnotationWrite {
  expected_version: number;
  app_name?: string;
  screenshot_desc?: string;
  widget_desc?: string;
  functionality?: string;
  excluded_parts?: string;
  ui_types?: string[];
  category?: string;
  cluster_id?: string | null;
  activity_type?: string | null;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly errorCode: string,
    message: string,
  ) {
    super(message);
  }
}

export function defaultQuery(): WidgetQuery {
  return { q: "", filters: {}, sortField: "widget_id", sortDesc: false, offset: 0, limit: 50 };
}

export function queryToParams(query: WidgetQuery): URLSearchParams {
  const params = new URLSearchParams();
  if (query.q) params.set("q", query.q);
  for (const [field, values] of Object.entries(query.filters)) {
    for (const value of values) params.append(`filter.${field}`, value);
  }
  params.set("sort", `${query.sortField}:${query.sortDesc ? "desc" : "asc"}`);
  params.set("offset", String(query.offset));
  params.set("limit", String(query.limit));
  return params;
}

type FetchFn = typeof fetch;

export class Api {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchFn = (...args) => globalThis.fetch(...args),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, init);
    const body = await response.json();
    if (!response.ok) {
      throw new ApiError(response.status, body.error_code ?? "Unknown", body.message ?? "");
    }
    return body as T;
  }

  getWidgets(query: WidgetQuery): Promise<WidgetPage> {
    return this.request(`/api/widgets?${queryToParams(query)}`);
  }

  async getWidget(widgetId: string): Promise<WidgetRow | null> {
    const query = { ...defaultQuery(), filters: { widget_id: [widgetId] }, limit: 1 };
    const page = await this.getWidgets(query);
    return page.rows[0] ?? null;
  }

  putAnnotation(widgetId: string, body: AnnotationWrite): Promise<{ version: number }> {
    return this.request(`/api/widgets/${encodeURIComponent(widgetId)}/annotation`, {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  suggest(field: string, prefix: string, k = 10): Promise<{ values: string[] }> {
    const params = new URLSearchParams({ field, prefix, k: String(k) });
    return this.request(`/api/suggest?${params}`);
  }

  getSummary(): Promise<SummaryPayload> {
    return this.request("/api/summary");
  }

  getCategories(): Promise<{ categories: string[]; ui_types: string[] }> {
    return this.request("/api/categories");
  }

  getScenarios(): Promise<{ scenarios: ScenarioInfo[] }> {
    return this.request("/api/scenarios");
  }

  getScene(p: string, env: string, task: string, step?: number): Promise<ScenePayload> {
    const suffix = step === undefined ? "" : `?step=${step}`;
    const path = [p, env, task].map(encodeURIComponent).join("/");
    return this.request(`/api/scene/${path}${suffix}`);
  }
}
