/** Browser entry point: wires the explorer, situation editor, wizard and
 * report panels onto one page. All state lives behind the HTTP API. */

import { MethLibClient } from "./api";
import { GraphExplorer } from "./explorer";
import { exportReport, formatReport } from "./report";
import { SituationEditor } from "./situation";
import { TreeWizard } from "./wizard";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className = "",
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

function renderExplorer(explorer: GraphExplorer, panel: HTMLElement, onChange: () => void): void {
  panel.replaceChildren();
  const list = el("ul", "node-list");
  for (const view of explorer.nodeViews()) {
    const item = el("li", view.dimmed ? "node dimmed" : view.marked ? "node marked" : "node");
    item.append(el("span", "kind", view.kind), el("span", "name", view.name));

    const markBtn = el("button", "", view.marked ? "unmark" : "mark");
    markBtn.onclick = async () => {
      await explorer.toggleMark(view.id);
      onChange();
    };
    const expandBtn = el("button", "", "expand");
    expandBtn.disabled = view.expanded;
    expandBtn.onclick = async () => {
      await explorer.expand(view.id);
      onChange();
    };
    item.append(markBtn, expandBtn);
    list.append(item);
  }
  panel.append(el("h2", "", "Component network"), list);

  const edges = el("ul", "edge-list");
  for (const edge of explorer.edgeViews()) {
    edges.append(el("li", "", `${edge.from} -${edge.label}-> ${edge.to}`));
  }
  panel.append(edges);
}

function renderSituation(editor: SituationEditor, panel: HTMLElement, onChange: () => void): void {
  panel.replaceChildren(el("h2", "", "Situation"));
  for (const row of editor.rows()) {
    const label = el("label", "", row.name + " ");
    const select = el("select");
    select.append(new Option("(unknown)", ""));
    for (const value of row.values) {
      select.append(new Option(value, value, false, value === row.selected));
    }
    select.onchange = async () => {
      await editor.set(row.slug, select.value || null);
      onChange();
    };
    label.append(select);
    panel.append(label);
  }
  const recs = el("ol", "recommendations");
  for (const r of editor.recommendations) {
    const cls = r.discouraged_only ? "discouraged" : "";
    recs.append(el("li", cls, `${r.component_name} (${r.firing.join(", ")})`));
  }
  panel.append(el("h3", "", "Recommended"), recs);
}

function renderWizard(wizard: TreeWizard, panel: HTMLElement, onChange: () => void): void {
  panel.replaceChildren(el("h2", "", "Wizard"));
  const q = wizard.question;
  if (q) {
    panel.append(el("p", "", q.name + "?"));
    for (const value of q.values) {
      const btn = el("button", "", value);
      btn.onclick = async () => {
        await wizard.answer(value);
        onChange();
      };
      panel.append(btn);
    }
  } else if (wizard.done) {
    panel.append(el("p", "", `Done; premarked: ${wizard.premarked.join(", ") || "(none)"}`));
  }
}

export async function mount(root: HTMLElement, baseUrl: string): Promise<void> {
  const client = new MethLibClient(baseUrl);
  const session = await client.createSession();

  const explorer = new GraphExplorer(client, session.id);
  const editor = new SituationEditor(client, session.id);
  await explorer.load();
  await editor.load();

  const trees = await TreeWizard.listTrees(client);
  const wizard = trees.length > 0 ? new TreeWizard(client, session.id, trees[0].id) : null;
  if (wizard) await wizard.start();

  const explorerPanel = el("section", "panel explorer");
  const situationPanel = el("section", "panel situation");
  const wizardPanel = el("section", "panel wizard");
  const reportPanel = el("section", "panel report");
  root.replaceChildren(explorerPanel, situationPanel, wizardPanel, reportPanel);

  const redraw = async () => {
    await explorer.refresh();
    await editor.refreshRecommendations();
    renderExplorer(explorer, explorerPanel, () => void redraw());
    renderSituation(editor, situationPanel, () => void redraw());
    if (wizard) renderWizard(wizard, wizardPanel, () => void redraw());

    reportPanel.replaceChildren(el("h2", "", "Report"));
    const btn = el("button", "", "export");
    btn.onclick = async () => {
      const exp = await exportReport(client, session.id);
      const pre = el("pre", "report-text", formatReport(exp));
      const dot = el("pre", "report-dot", exp.dot);
      reportPanel.replaceChildren(el("h2", "", "Report"), btn, pre, dot);
    };
    reportPanel.append(btn);
  };
  await redraw();
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  void mount(
    document.getElementById("app")!,
    (window as unknown as { METHLIB_API?: string }).METHLIB_API ?? "http://127.0.0.1:8000",
  );
}
