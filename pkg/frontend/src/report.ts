/** Report export: structured JSON and DOT text for the current selection. */

import { MethLibClient, ReportJson } from "./api";

export interface ReportExport {
  report: ReportJson;
  dot: string;
}

export async function exportReport(
  client: MethLibClient,
  sessionId: string,
): Promise<ReportExport> {
  const [report, dot] = await Promise.all([
    client.getReport(sessionId),
    client.exportDot(sessionId),
  ]);
  return { report, dot };
}

/** Plain-text rendering used by the download button. */
export function formatReport(exp: ReportExport): string {
  const { report } = exp;
  const lines: string[] = [`Selection report for session ${report.session_id}`, ""];
  lines.push("Situation:");
  const slugs = Object.keys(report.situation).sort();
  if (slugs.length === 0) lines.push("  (empty)");
  for (const slug of slugs) lines.push(`  ${slug} = ${report.situation[slug]}`);
  lines.push("", "Selected components:");
  if (report.components.length === 0) lines.push("  (none)");
  for (const c of report.components) lines.push(`  [${c.kind}] ${c.name}`);
  lines.push("", "Relations inside the selection:");
  if (report.induced_relations.length === 0) lines.push("  (none)");
  for (const r of report.induced_relations) {
    lines.push(`  ${r.from} -${r.label}-> ${r.to}`);
  }
  lines.push("", "Firing heuristics:");
  if (report.firing_heuristics.length === 0) lines.push("  (none)");
  for (const f of report.firing_heuristics) {
    lines.push(`  ${f.heuristic_id} ${f.strength}s ${f.component_id}`);
  }
  if (report.dropped_marks.length > 0) {
    lines.push("", `Dropped marks (components no longer exist): ${report.dropped_marks.join(", ")}`);
  }
  return lines.join("\n") + "\n";
}
