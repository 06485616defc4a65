import { createServer, type Server } from "node:http";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import {
  connect,
  ConnectionError,
  MalformedRegistryError,
  RemoteError,
  snakeCase,
  type AppProxy,
  type EndpointNode,
} from "../src/index.js";

const REGISTRY = {
  "tide/open": ["PUT"],
  "tide/options": ["GET", "PUT"],
  "tide/resize-window": ["PUT"],
  "demo/camera": ["GET", "PUT"],
};

const SCHEMAS: Record<string, unknown> = {
  "tide/open": { title: "Open", type: "object", properties: { uri: { type: "string" } } },
  "tide/options": {
    title: "Options",
    type: "object",
    properties: { alphaBlending: { type: "boolean" } },
  },
  "tide/resize-window": {
    title: "ResizeWindow",
    type: "object",
    properties: { width: { type: "integer" }, height: { type: "integer" } },
  },
  "demo/camera": { title: "Camera", type: "object", properties: { origin: { type: "object" } } },
};

let server: Server;
let base: string;
const state: Record<string, unknown> = { "tide/options": { alphaBlending: false } };

beforeAll(async () => {
  server = createServer((req, res) => {
    const path = (req.url ?? "/").replace(/\/+$/, "");
    const reply = (status: number, body: unknown) => {
      const text = JSON.stringify(body);
      res.writeHead(status, { "Content-Type": "application/json" });
      res.end(text);
    };
    if (req.method === "GET" && path === "/registry") {
      return reply(200, REGISTRY);
    }
    const schemaMatch = /^\/(.+)\/schema$/.exec(path);
    if (req.method === "GET" && schemaMatch && SCHEMAS[schemaMatch[1]]) {
      return reply(200, SCHEMAS[schemaMatch[1]]);
    }
    const name = path.slice(1);
    if (!(name in REGISTRY)) {
      return reply(404, { error: `no endpoint '${name}'` });
    }
    if (req.method === "GET") {
      return reply(200, state[name] ?? {});
    }
    if (req.method === "PUT") {
      let body = "";
      req.on("data", (chunk) => (body += chunk));
      req.on("end", () => {
        const parsed = JSON.parse(body) as Record<string, unknown>;
        const properties = (SCHEMAS[name] as { properties: Record<string, unknown> })
          .properties;
        for (const key of Object.keys(parsed)) {
          if (!(key in properties)) {
            return reply(400, { error: `unknown key '${key}'` });
          }
        }
        state[name] = { ...(state[name] as object), ...parsed };
        res.writeHead(200, { "Content-Type": "application/json" });
        res.end();
      });
      return;
    }
    return reply(405, { error: "verb not allowed" });
  });
  await new Promise<void>((resolve) => server.listen(0, "127.0.0.1", resolve));
  const address = server.address();
  if (address === null || typeof address === "string") throw new Error("no port");
  base = `http://127.0.0.1:${address.port}`;
});

afterAll(() => {
  server.close();
});

describe("connect", () => {
  it("builds one accessor per registry entry and nothing else", async () => {
    const proxy = await connect(base);
    expect(proxy.$registry).toEqual(REGISTRY);
    expect(Object.keys(proxy.$endpoints).sort()).toEqual(Object.keys(REGISTRY).sort());
    const tree = proxy as AppProxy & Record<string, Record<string, EndpointNode>>;
    expect(Object.keys(tree.tide).sort()).toEqual(["open", "options", "resize_window"]);
    expect(Object.keys(tree.demo)).toEqual(["camera"]);
  });

  it("maps kebab-case to snake_case and keeps PUT-only endpoints callable", async () => {
    const proxy = (await connect(base)) as AppProxy & Record<string, any>;
    const resize = proxy.tide.resize_window as EndpointNode;
    expect(typeof resize).toBe("function");
    expect(resize.get).toBeUndefined(); // write-only: no getter exists
    expect(resize.verbs).toEqual(["PUT"]);
    await resize.set!({ width: 10, height: 20 });
  });

  it("exposes get and set on read-write endpoints", async () => {
    const proxy = (await connect(base)) as AppProxy & Record<string, any>;
    const options = proxy.tide.options as EndpointNode;
    await options.set!({ alphaBlending: true });
    expect(await options.get!()).toEqual({ alphaBlending: true });
    expect(options.schema).toEqual(SCHEMAS["tide/options"]);
  });

  it("accepts tcp:// and bare host:port addresses", async () => {
    const hostport = base.slice("http://".length);
    const viaTcp = await connect(`tcp://${hostport}`);
    expect(viaTcp.$url).toBe(base);
    const bare = await connect(hostport);
    expect(bare.$url).toBe(base);
  });

  it("raises RemoteError with the server's status and body", async () => {
    const proxy = (await connect(base)) as AppProxy & Record<string, any>;
    const options = proxy.tide.options as EndpointNode;
    const failure = options.set!({ wrongKey: 1 });
    await expect(failure).rejects.toBeInstanceOf(RemoteError);
    await options.set!({ wrongKey: 1 }).catch((error: RemoteError) => {
      expect(error.status).toBe(400);
      expect(error.body).toContain("wrongKey");
    });
  });

  it("rejects unreachable servers with ConnectionError", async () => {
    await expect(connect("http://127.0.0.1:1")).rejects.toBeInstanceOf(ConnectionError);
  });

  it("rejects a non-object registry as malformed", async () => {
    const bad = createServer((_req, res) => {
      res.writeHead(200, { "Content-Type": "application/json" });
      res.end("[1,2,3]");
    });
    await new Promise<void>((resolve) => bad.listen(0, "127.0.0.1", resolve));
    const address = bad.address();
    if (address === null || typeof address === "string") throw new Error("no port");
    try {
      await expect(connect(`http://127.0.0.1:${address.port}`)).rejects.toBeInstanceOf(
        MalformedRegistryError,
      );
    } finally {
      bad.close();
    }
  });

  it("builds an empty proxy from an empty registry", async () => {
    const empty = createServer((_req, res) => {
      res.writeHead(200, { "Content-Type": "application/json" });
      res.end("{}");
    });
    await new Promise<void>((resolve) => empty.listen(0, "127.0.0.1", resolve));
    const address = empty.address();
    if (address === null || typeof address === "string") throw new Error("no port");
    try {
      const proxy = await connect(`http://127.0.0.1:${address.port}`);
      expect(proxy.$registry).toEqual({});
      expect(Object.keys(proxy.$endpoints)).toEqual([]);
      const ownKeys = Object.keys(proxy).filter((key) => !key.startsWith("$"));
      expect(ownKeys).toEqual([]);
    } finally {
      empty.close();
    }
  });
});

describe("name mapping", () => {
  it("is total and injective over kebab names", () => {
    const names = ["resize-window", "options", "a-b-c", "x2-go"];
    const mapped = names.map(snakeCase);
    expect(mapped).toEqual(["resize_window", "options", "a_b_c", "x2_go"]);
    expect(new Set(mapped).size).toBe(names.length);
  });
});
