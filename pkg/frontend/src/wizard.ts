/** Decision-tree wizard: steps a session through one tree's questions,
 * mirroring the walk state kept by the server. */

import { MethLibClient, TreeSummary, WalkQuestion, WalkState } from "./api";

export class TreeWizard {
  private state: WalkState | null = null;

  constructor(
    private readonly client: MethLibClient,
    readonly sessionId: string,
    readonly treeId: string,
  ) {}

  static async listTrees(client: MethLibClient): Promise<TreeSummary[]> {
    return client.listTrees();
  }

  async start(): Promise<void> {
    this.state = await this.client.getWalk(this.sessionId, this.treeId);
  }

  get done(): boolean {
    return this.state?.done ?? false;
  }

  get question(): WalkQuestion | null {
    return this.state && !this.state.done ? this.state.question ?? null : null;
  }

  get premarked(): string[] {
    return this.state?.done ? this.state.premarked ?? [] : [];
  }

  get path(): [string, string][] {
    return this.state?.path ?? [];
  }

  /** Answer the current question; the server records it into the session. */
  async answer(value: string): Promise<void> {
    if (!this.state || this.state.done) {
      throw new Error("wizard is not at a question");
    }
    this.state = await this.client.answerWalk(this.sessionId, this.treeId, value);
  }
}
