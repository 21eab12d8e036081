/**
 * Browser entry point: builds the panel tree, connects to the bridge,
 * and drives one render loop off the store. Socket events queue into
 * the same loop; nothing renders except from ViewState.
 */

import { DebugClient, WebSocketTransport } from "./client.js";
import { UiController } from "./controller.js";
import { Store, ViewState } from "./state.js";
import { GraphView } from "./views/graph.js";
import { IrView } from "./views/irview.js";
import {
  BannerView,
  ControlsView,
  ResultsView,
  ToastView,
  UnitInfoView,
} from "./views/panels.js";

const SAMPLE = `method main() { x = source()
  y = sanitize(x)
  sink(x)
  sink(y)
}
`;

function el<K extends keyof HTMLElementTagNameMap>(id: string): HTMLElementTagNameMap[K] {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing #${id}`);
  return found as HTMLElementTagNameMap[K];
}

interface Panels {
  render(state: ViewState): void;
}

function buildPanels(controller: UiController, store: Store): Panels {
  const graphView = new GraphView(el("graph"), controller);
  const irView = new IrView(el("ir"), controller);
  const resultsView = new ResultsView(el("results"), controller);
  const unitInfoView = new UnitInfoView(el("unitinfo"));
  el("controls").textContent = "";
  const controlsView = new ControlsView(el("controls"), controller);
  return {
    render(state: ViewState) {
      graphView.render(state);
      irView.render(state);
      resultsView.render(state);
      unitInfoView.render(state);
      controlsView.render(state);
    },
  };
}

function main() {
  const store = new Store();
  let panels: Panels | null = null;
  let controller: UiController | null = null;

  const program = el<"textarea">("program");
  program.value = SAMPLE;
  const analysis = el<"select">("analysis");
  const urlInput = el<"input">("bridge-url");

  const bannerView = new BannerView(el("banner"));
  const toastView = new ToastView(el("toast"), () => store.clearToast());

  store.subscribe((state) => {
    bannerView.render(state);
    toastView.render(state);
    panels?.render(state);
  });

  const doConnect = async () => {
    store.update((state) => {
      state.connection = "connecting";
    });
    try {
      const transport = await WebSocketTransport.connect(urlInput.value);
      controller = new UiController(new DebugClient(transport), store);
      panels = buildPanels(controller, store);
      await controller.load(program.value, analysis.value);
      await controller.refreshResults();
    } catch (err) {
      store.update((state) => {
        state.connection = "disconnected";
      });
      store.showToast(String(err));
    }
  };

  el<"button">("connect").addEventListener("click", () => void doConnect());
  el<"button">("reload").addEventListener("click", () => {
    const active = controller;
    if (active) {
      void active
        .load(program.value, analysis.value)
        .then(() => active.refreshResults())
        .catch((err) => store.showToast(String(err)));
    }
  });
}

main();
