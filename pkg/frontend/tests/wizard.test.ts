import { describe, expect, it } from "vitest";

import { MethLibClient } from "../src/api";
import { TreeWizard } from "../src/wizard";
import { BASE_URL } from "./setup/config";

const client = new MethLibClient(BASE_URL);

async function freshWizard(): Promise<TreeWizard> {
  const session = await client.createSession();
  const trees = await TreeWizard.listTrees(client);
  expect(trees.length).toBeGreaterThan(0);
  const wizard = new TreeWizard(client, session.id, trees[0].id);
  await wizard.start();
  return wizard;
}

describe("decision-tree wizard", () => {
  it("starts at the tree's first question", async () => {
    const wizard = await freshWizard();
    expect(wizard.done).toBe(false);
    expect(wizard.question?.factor).toBe("data_complexity");
    expect(wizard.question?.values).toContain("high");
  });

  it("answering high reaches the premarking leaf and updates the session", async () => {
    const wizard = await freshWizard();
    await wizard.answer("high");
    expect(wizard.done).toBe(true);

    const [tool] = await client.listComponents('name ~ "natural language"');
    expect(wizard.premarked).toEqual([tool.id]);

    const session = await client.getSession(wizard.sessionId);
    expect(session.situation).toEqual({ data_complexity: "high" });
    expect(session.premarked).toEqual([tool.id]);
  });

  it("other answers take the default branch with no premarks", async () => {
    const wizard = await freshWizard();
    await wizard.answer("low");
    expect(wizard.done).toBe(true);
    expect(wizard.premarked).toEqual([]);
  });

  it("refuses to answer past a leaf", async () => {
    const wizard = await freshWizard();
    await wizard.answer("low");
    await expect(wizard.answer("low")).rejects.toThrow();
  });

  it("restarting resumes the recorded walk", async () => {
    const wizard = await freshWizard();
    await wizard.answer("high");
    const resumed = new TreeWizard(client, wizard.sessionId, wizard.treeId);
    await resumed.start();
    expect(resumed.done).toBe(true);
    expect(resumed.path).toEqual(wizard.path);
  });
});
