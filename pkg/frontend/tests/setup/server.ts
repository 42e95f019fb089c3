/** Global test setup: build a library file from the checked-in seed batch
 * and serve it with the real HTTP service for the duration of the run. */

import { spawn, ChildProcess, execFileSync } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join, resolve } from "node:path";
import { fileURLToPath } from "node:url";

import { BASE_URL } from "./config";

const REPO_ROOT = resolve(dirname(fileURLToPath(import.meta.url)), "../../..");

let server: ChildProcess | undefined;
let workDir: string | undefined;

async function waitForServer(url: string, timeoutMs = 20000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const res = await fetch(`${url}/components`);
      if (res.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 200));
  }
  throw new Error(`service at ${url} did not come up within ${timeoutMs}ms`);
}

export async function setup(): Promise<void> {
  workDir = mkdtempSync(join(tmpdir(), "methlib-ui-"));
  const libPath = join(workDir, "library.json");

  const buildScript = [
    "import json, sys",
    "from methlib import store",
    "from methlib.ingest import import_batch",
    "from methlib.model import Library",
    "lib = Library()",
    "report = import_batch(lib, json.load(open(sys.argv[1])))",
    "assert not report.rejected, report.rejected",
    "store.save(lib, sys.argv[2])",
  ].join("\n");
  execFileSync("python3", [
    "-c",
    buildScript,
    join(REPO_ROOT, "fixtures", "seed_batch.json"),
    libPath,
  ]);

  const [, hostPort] = BASE_URL.split("//");
  server = spawn("methlib", ["serve", libPath, "--bind", hostPort], {
    stdio: "ignore",
  });
  server.on("error", (err) => {
    throw err;
  });
  await waitForServer(BASE_URL);
}

export async function teardown(): Promise<void> {
  if (server && !server.killed) {
    server.kill("SIGTERM");
    await new Promise((r) => setTimeout(r, 300));
  }
  if (workDir) rmSync(workDir, { recursive: true, force: true });
}
