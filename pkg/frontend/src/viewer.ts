/** Top-down (x, z) layout viewer with a per-event history step slider.
 *
 * Markers come straight from the scene payload for the selected step;
 * clicking a marker selects that widget in the data table.
 */

import { Api, ApiError, ScenarioInfo, ScenePayload } from "./api.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const VIEW_SIZE = 480;

export interface ViewerCallbacks {
  onSelectWidget: (widgetId: string) => void;
}

export class LayoutViewer {
  private scenario: ScenarioInfo | null = null;
  private step = 0; // 0 = latest

  constructor(
    private readonly container: HTMLElement,
    private readonly api: Api,
    private readonly callbacks: ViewerCallbacks,
  ) {}

  async showScenarioList(): Promise<void> {
    const { scenarios } = await this.api.getScenarios();
    this.container.textContent = "";
    const select = document.createElement("select");
    select.setAttribute("data-testid", "scenario-select");
    select.appendChild(new Option("— choose a scenario —", ""));
    for (const s of scenarios) {
      const path = `${s.participant_id}/${s.environment}/${s.task}`;
      select.appendChild(new Option(`${path} (${s.max_seq} events)`, path));
    }
    select.addEventListener("change", () => {
      const found = scenarios.find(
        (s) => `${s.participant_id}/${s.environment}/${s.task}` === select.value,
      );
      if (found) void this.show(found);
    });
    this.container.appendChild(select);
    this.container.appendChild(this.canvasHost());
  }

  private canvasHost(): HTMLElement {
    const host = document.createElement("div");
    host.setAttribute("data-testid", "viewer-canvas");
    return host;
  }

  async show(scenario: ScenarioInfo, step?: number): Promise<void> {
    this.scenario = scenario;
    this.step = step ?? scenario.max_seq;
    await this.renderScene();
  }

  private async renderScene(): Promise<void> {
    if (!this.scenario) return;
    const host = this.container.querySelector('[data-testid="viewer-canvas"]');
    if (!host) return;
    host.textContent = "";
    let scene: ScenePayload;
    try {
      scene = await this.api.getScene(
        this.scenario.participant_id,
        this.scenario.environment,
        this.scenario.task,
        this.step,
      );
    } catch (err) {
      const msg = document.createElement("div");
      msg.className = "error-banner";
      msg.setAttribute("data-testid", "viewer-error");
      msg.textContent = err instanceof ApiError ? `${err.errorCode}: ${err.message}` : String(err);
      host.appendChild(msg);
      return;
    }

    const slider = document.createElement("input");
    slider.type = "range";
    slider.min = "1";
    slider.max = String(this.scenario.max_seq);
    slider.value = String(this.step);
    slider.setAttribute("data-testid", "step-slider");
    slider.addEventListener("input", () => {
      this.step = Number(slider.value);
      void this.renderScene();
    });
    const stepLabel = document.createElement("span");
    stepLabel.setAttribute("data-testid", "step-label");
    stepLabel.textContent = `step ${scene.as_of_seq} / ${this.scenario.max_seq}`;
    host.append(slider, stepLabel);

    host.appendChild(renderMarkers(scene, this.callbacks.onSelectWidget));
  }
}

/** Pure SVG rendering so tests can drive it with a fixed payload. */
export function renderMarkers(
  scene: ScenePayload,
  onSelect: (widgetId: string) => void,
): SVGSVGElement {
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${VIEW_SIZE} ${VIEW_SIZE}`);
  svg.setAttribute("width", String(VIEW_SIZE));
  svg.setAttribute("height", String(VIEW_SIZE));
  svg.setAttribute("data-testid", "scene-svg");

  const xs = scene.widgets.map((w) => w.pose.position[0]);
  const zs = scene.widgets.map((w) => w.pose.position[2]);
  const pad = 1.0;
  const minX = Math.min(0, ...xs) - pad;
  const maxX = Math.max(0, ...xs) + pad;
  const minZ = Math.min(0, ...zs) - pad;
  const maxZ = Math.max(0, ...zs) + pad;
  const span = Math.max(maxX - minX, maxZ - minZ);
  const scale = VIEW_SIZE / span;

  for (const w of scene.widgets) {
    const [x, , z] = w.pose.position;
    const marker = document.createElementNS(SVG_NS, "circle");
    marker.setAttribute("cx", String((x - minX) * scale));
    // +z toward the viewer: top of the canvas is -z
    marker.setAttribute("cy", String((z - minZ) * scale));
    marker.setAttribute("r", "6");
    marker.classList.add("marker");
    marker.setAttribute("data-widget-id", w.widget_id);
    const title = document.createElementNS(SVG_NS, "title");
    title.textContent = `${w.widget_id} (${x.toFixed(2)}, ${z.toFixed(2)})`;
    marker.appendChild(title);
    marker.addEventListener("click", () => onSelect(w.widget_id));
    svg.appendChild(marker);
  }
  return svg;
}
