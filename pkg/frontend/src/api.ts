/** Typed client for the methlib HTTP API. All UI modules go through this;
 * nothing in the front end touches library state except via these calls. */

export interface SourceJson {
  citation: string;
  pages: string | null;
  extra: Record<string, unknown>;
}

export interface ComponentJson {
  id: string;
  kind: string;
  name: string;
  description: string;
  source: SourceJson;
  properties: Record<string, string[]>;
}

export interface RelationJson {
  id: string;
  from: string;
  to: string;
  label: string;
}

export interface NeighborRow {
  relation: RelationJson;
  component: ComponentJson;
  direction: "in" | "out";
}

export interface RecommendationJson {
  component_id: string;
  component_name: string;
  firing: string[];
  recommends: number;
  discourages: number;
  discouraged_only: boolean;
}

export interface SessionJson {
  id: string;
  situation: Record<string, string>;
  marked: string[];
  premarked: string[];
  created: string;
  updated: string;
}

export interface FactorJson {
  id: string;
  slug: string;
  name: string;
  values: string[];
  description: string;
}

export interface TreeSummary {
  id: string;
  name: string;
}

export interface WalkQuestion {
  factor: string;
  name: string;
  values: string[];
}

export interface WalkState {
  tree_id: string;
  path: [string, string][];
  done: boolean;
  question?: WalkQuestion;
  premarked?: string[];
  note?: string;
}

export interface FiringJson {
  heuristic_id: string;
  component_id: string;
  strength: string;
}

export interface ReportJson {
  session_id: string;
  situation: Record<string, string>;
  components: ComponentJson[];
  induced_relations: RelationJson[];
  firing_heuristics: FiringJson[];
  dropped_marks: string[];
}

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

type Assignments = Record<string, string | null>;

export class MethLibClient {
  constructor(private readonly baseUrl: string) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const res = await fetch(this.baseUrl + path, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await res.text();
    if (!res.ok) {
      let code = "http_error";
      let message = text || res.statusText;
      try {
        const parsed = JSON.parse(text);
        code = parsed.code ?? code;
        message = parsed.message ?? message;
      } catch {
        // non-JSON error body; keep the raw text
      }
      throw new ApiError(res.status, code, message);
    }
    return (text ? JSON.parse(text) : undefined) as T;
  }

  listComponents(query = "all"): Promise<ComponentJson[]> {
    return this.request("GET", `/components?query=${encodeURIComponent(query)}`);
  }

  getComponent(id: string): Promise<ComponentJson> {
    return this.request("GET", `/components/${id}`);
  }

  neighbors(id: string, direction = "both", label?: string): Promise<NeighborRow[]> {
    const params = new URLSearchParams({ direction });
    if (label) params.set("label", label);
    return this.request("GET", `/network/${id}/neighbors?${params}`);
  }

  recommend(situation: Record<string, string>, selection: string[] = []): Promise<RecommendationJson[]> {
    return this.request("POST", "/recommend", { situation, selection });
  }

  createSession(situation: Record<string, string> = {}): Promise<SessionJson> {
    return this.request("POST", "/sessions", { situation });
  }

  getSession(id: string): Promise<SessionJson> {
    return this.request("GET", `/sessions/${id}`);
  }

  mark(sessionId: string, componentId: string): Promise<{ changed: boolean; marked: string[] }> {
    return this.request("POST", `/sessions/${sessionId}/mark`, { component: componentId });
  }

  unmark(sessionId: string, componentId: string): Promise<{ changed: boolean; marked: string[] }> {
    return this.request("POST", `/sessions/${sessionId}/unmark`, { component: componentId });
  }

  updateSituation(sessionId: string, assignments: Assignments): Promise<SessionJson> {
    return this.request("PATCH", `/sessions/${sessionId}/situation`, { assignments });
  }

  getReport(sessionId: string): Promise<ReportJson> {
    return this.request("GET", `/sessions/${sessionId}/report`);
  }

  listTrees(): Promise<TreeSummary[]> {
    return this.request("GET", "/trees");
  }

  getWalk(sessionId: string, treeId: string): Promise<WalkState> {
    return this.request("GET", `/sessions/${sessionId}/walk/${treeId}`);
  }

  answerWalk(sessionId: string, treeId: string, value: string): Promise<WalkState> {
    return this.request("POST", `/sessions/${sessionId}/walk/${treeId}/answer`, { value });
  }

  listFactors(): Promise<FactorJson[]> {
    return this.request("GET", "/factors");
  }

  async exportDot(sessionId?: string): Promise<string> {
    const suffix = sessionId ? `?session=${sessionId}` : "";
    const res = await fetch(`${this.baseUrl}/export/dot${suffix}`);
    if (!res.ok) {
      throw new ApiError(res.status, "http_error", await res.text());
    }
    return res.text();
  }
}
