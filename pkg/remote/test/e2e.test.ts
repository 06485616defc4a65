/**
 * End-to-end acceptance: launch the real demo service, drive it through
 * the generated proxy, verify the rendered frame, and prove teardown
 * leaves no child behind.  Requires the Python package to be installed
 * (`mock-renderer` on PATH, or set MOCK_RENDERER=/path/to/it).
 */

import { describe, expect, it } from "vitest";

import { launch, RemoteError, type EndpointNode } from "../src/index.js";
import { processAlive } from "./procutil.js";

const RENDERER = process.env.MOCK_RENDERER ?? "mock-renderer";

describe("remote control of mock-renderer", () => {
  it("launches, sets the camera, reads a red frame, and tears down", async () => {
    const started = Date.now();
    const app = await launch([RENDERER, "--http", "127.0.0.1:0"]);
    try {
      const proxy = app.proxy as typeof app.proxy & {
        demo: { camera: EndpointNode; frame: EndpointNode };
      };
      expect(Object.keys(proxy.$registry).sort()).toEqual(["demo/camera", "demo/frame"]);

      // read-write camera, read-only frame
      expect(proxy.demo.camera.get).toBeDefined();
      expect(proxy.demo.camera.set).toBeDefined();
      expect(proxy.demo.frame.get).toBeDefined();
      expect(proxy.demo.frame.set).toBeUndefined();

      await proxy.demo.camera.set!({ origin: { x: 1.0, y: 0.0, z: 0.0 } });
      const camera = (await proxy.demo.camera.get!()) as {
        origin: { x: number; y: number; z: number };
      };
      expect(camera.origin).toEqual({ x: 1.0, y: 0.0, z: 0.0 });

      const frame = (await proxy.demo.frame.get!()) as {
        width: number;
        height: number;
        data: string;
      };
      expect(frame.width).toBe(16);
      expect(frame.height).toBe(16);
      const pixels = Buffer.from(frame.data, "base64");
      expect(pixels.length).toBe(16 * 16 * 3);
      // channel = round(|coordinate| * 255) % 256: red-dominant everywhere
      for (let i = 0; i < pixels.length; i += 3) {
        expect(pixels[i]).toBe(255);
        expect(pixels[i + 1]).toBe(0);
        expect(pixels[i + 2]).toBe(0);
      }

      // server-side validation surfaces as RemoteError(400)
      await expect(proxy.demo.camera.set!({ nonsense: 1 })).rejects.toMatchObject({
        name: "RemoteError",
        status: 400,
      });
      await expect(
        proxy.demo.camera.set!({ nonsense: 1 }),
      ).rejects.toBeInstanceOf(RemoteError);
    } finally {
      const pid = app.pid;
      await app.dispose();
      expect(processAlive(pid)).toBe(false); // no leaked child
    }
    expect(Date.now() - started).toBeLessThan(15_000);
  }, 20_000);
});
