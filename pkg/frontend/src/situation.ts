/** Situation editor: a form over the library's situational factors.
 * Every change patches the session and re-fetches recommendations. */

import { FactorJson, MethLibClient, RecommendationJson } from "./api";

export interface FactorRow {
  slug: string;
  name: string;
  values: string[];
  selected: string | null;
}

export class SituationEditor {
  private factors: FactorJson[] = [];
  private assignments: Record<string, string> = {};
  recommendations: RecommendationJson[] = [];

  constructor(
    private readonly client: MethLibClient,
    readonly sessionId: string,
  ) {}

  async load(): Promise<void> {
    this.factors = await this.client.listFactors();
    const session = await this.client.getSession(this.sessionId);
    this.assignments = { ...session.situation };
    await this.refreshRecommendations();
  }

  rows(): FactorRow[] {
    return this.factors.map((f) => ({
      slug: f.slug,
      name: f.name,
      values: f.values,
      selected: this.assignments[f.slug] ?? null,
    }));
  }

  /** Assign (or clear, with null) one factor and refresh recommendations. */
  async set(slug: string, value: string | null): Promise<void> {
    const session = await this.client.updateSituation(this.sessionId, {
      [slug]: value,
    });
    this.assignments = { ...session.situation };
    await this.refreshRecommendations();
  }

  async refreshRecommendations(): Promise<void> {
    const session = await this.client.getSession(this.sessionId);
    this.recommendations = await this.client.recommend(
      this.assignments,
      session.marked,
    );
  }

  situation(): Record<string, string> {
    return { ...this.assignments };
  }
}
