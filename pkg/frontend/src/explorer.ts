/** Graph explorer state: a visible subgraph of the component network that
 * grows by expanding neighbors, with click-to-mark wired to the session. */

import {
  ComponentJson,
  MethLibClient,
  RelationJson,
} from "./api";

export interface NodeView {
  id: string;
  name: string;
  kind: string;
  marked: boolean;
  premarked: boolean;
  /** premarked by a wizard but not yet confirmed with a mark */
  dimmed: boolean;
  expanded: boolean;
}

export interface EdgeView {
  id: string;
  from: string;
  to: string;
  label: string;
}

export class GraphExplorer {
  private nodes = new Map<string, ComponentJson>();
  private edges = new Map<string, RelationJson>();
  private expandedIds = new Set<string>();
  private marked = new Set<string>();
  private premarked = new Set<string>();

  constructor(
    private readonly client: MethLibClient,
    readonly sessionId: string,
  ) {}

  /** Seed the visible subgraph from an exact query. */
  async load(query = "all"): Promise<void> {
    for (const c of await this.client.listComponents(query)) {
      this.nodes.set(c.id, c);
    }
    await this.refresh();
  }

  /** Pull session marks so views reflect what other panels changed. */
  async refresh(): Promise<void> {
    const session = await this.client.getSession(this.sessionId);
    this.marked = new Set(session.marked);
    this.premarked = new Set(session.premarked);
  }

  /** Expand one node: fetch its neighbors into the subgraph.
   * Returns the ids of components that were not visible before. */
  async expand(componentId: string): Promise<string[]> {
    const rows = await this.client.neighbors(componentId, "both");
    const added: string[] = [];
    for (const row of rows) {
      if (!this.nodes.has(row.component.id)) {
        this.nodes.set(row.component.id, row.component);
        added.push(row.component.id);
      }
      this.edges.set(row.relation.id, row.relation);
    }
    this.expandedIds.add(componentId);
    return added;
  }

  /** Click handler: toggles the session mark for a node. */
  async toggleMark(componentId: string): Promise<boolean> {
    if (this.marked.has(componentId)) {
      await this.client.unmark(this.sessionId, componentId);
      this.marked.delete(componentId);
      return false;
    }
    await this.client.mark(this.sessionId, componentId);
    this.marked.add(componentId);
    return true;
  }

  nodeView(componentId: string): NodeView | undefined {
    const c = this.nodes.get(componentId);
    if (!c) return undefined;
    const marked = this.marked.has(componentId);
    const premarked = this.premarked.has(componentId);
    return {
      id: c.id,
      name: c.name,
      kind: c.kind,
      marked,
      premarked,
      dimmed: premarked && !marked,
      expanded: this.expandedIds.has(componentId),
    };
  }

  nodeViews(): NodeView[] {
    return [...this.nodes.keys()]
      .map((id) => this.nodeView(id)!)
      .sort((a, b) => a.name.localeCompare(b.name) || a.id.localeCompare(b.id));
  }

  /** Only edges whose both endpoints are visible are drawn. */
  edgeViews(): EdgeView[] {
    return [...this.edges.values()]
      .filter((e) => this.nodes.has(e.from) && this.nodes.has(e.to))
      .map((e) => ({ id: e.id, from: e.from, to: e.to, label: e.label }))
      .sort((a, b) => a.id.localeCompare(b.id));
  }

  markedIds(): string[] {
    return [...this.marked].sort();
  }
}
