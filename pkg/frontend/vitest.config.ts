import { defineConfig } from 'vitest/config';

export default defineConfig({
  test: {
    include: ['tests/**/*.test.ts'],
    // the e2e test boots the Python service in a child process
    testTimeout: 30_000,
    hookTimeout: 30_000,
  },
});
