import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    globalSetup: ["tests/setup/server.ts"],
    testTimeout: 20000,
    hookTimeout: 30000,
    // all tests share one live server; run files sequentially so session
    // bookkeeping in assertions stays easy to reason about
    fileParallelism: false,
  },
});
