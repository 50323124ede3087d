// plain object, no "vitest/config" import: the config must also load
// when vitest runs from a global toolchain with no local node_modules
export default {
  test: {
    include: ["test/**/*.test.ts"],
    // gateway-backed tests spawn the engine once per file
    testTimeout: 20000,
    hookTimeout: 30000,
    pool: "forks",
  },
};
