/**
 * Dynamic client generation from a running server's REST introspection.
 *
 * connect() fetches /registry plus every endpoint's JSON Schema and
 * builds a proxy tree mirroring the endpoint names: path segments become
 * nested attributes, kebab-case becomes snake_case, so the registry
 * entry `tide/resize-window` is reachable as `proxy.tide.resize_window`.
 * GET-capable endpoints get a `get()`, PUT-capable ones get a `set(args)`
 * and are themselves callable with the same arguments.  Nothing about
 * the served application is needed at build time; the registry alone
 * determines the proxy surface.
 */

import { ConnectionError, MalformedRegistryError, RemoteError } from "./errors.js";

export type Registry = Record<string, string[]>;

export interface Endpoint {
  /** registry name, e.g. "demo/camera" */
  readonly name: string;
  readonly verbs: readonly string[];
  /** parsed JSON Schema for the endpoint's object */
  readonly schema: Record<string, unknown>;
  /** present iff the endpoint allows GET */
  readonly get?: () => Promise<unknown>;
  /** present iff the endpoint allows PUT; the server validates keys */
  readonly set?: (args: Record<string, unknown>) => Promise<void>;
}

export type PutFn = (args: Record<string, unknown>) => Promise<void>;

/** PUT-capable endpoints are additionally callable: `node({...})`. */
export type EndpointNode = Endpoint | (Endpoint & PutFn);

export interface ProxyTree {
  [segment: string]: ProxyTree | EndpointNode;
}

export type AppProxy = ProxyTree & {
  /** base URL of the server, e.g. "http://127.0.0.1:8100" */
  readonly $url: string;
  /** registry snapshot taken at connect() time */
  readonly $registry: Registry;
  /** flat endpoint lookup by registry name */
  readonly $endpoints: Record<string, EndpointNode>;
};

export function snakeCase(segment: string): string {
  return segment.replaceAll("-", "_");
}

export function normalizeBaseUrl(url: string): string {
  let base = url.trim();
  if (base.startsWith("tcp://")) {
    base = "http://" + base.slice("tcp://".length);
  }
  if (!base.startsWith("http://") && !base.startsWith("https://")) {
    base = "http://" + base;
  }
  return base.replace(/\/+$/, "");
}

async function fetchOk(url: string): Promise<Response> {
  let response: Response;
  try {
    response = await fetch(url);
  } catch (cause) {
    throw new ConnectionError(`cannot reach ${url}`, { cause });
  }
  if (!response.ok) {
    throw new MalformedRegistryError(`${url} answered ${response.status}`);
  }
  return response;
}

function parseRegistry(data: unknown): Registry {
  if (typeof data !== "object" || data === null || Array.isArray(data)) {
    throw new MalformedRegistryError("registry is not a JSON object");
  }
  const registry: Registry = {};
  for (const [name, verbs] of Object.entries(data)) {
    if (
      !Array.isArray(verbs) ||
      verbs.some((verb) => typeof verb !== "string") ||
      name.length === 0
    ) {
      throw new MalformedRegistryError(`registry entry ${JSON.stringify(name)} is invalid`);
    }
    registry[name] = verbs as string[];
  }
  return registry;
}

function makeEndpoint(
  base: string,
  name: string,
  verbs: readonly string[],
  schema: Record<string, unknown>,
): EndpointNode {
  const url = `${base}/${name}`;

  const doGet = async (): Promise<unknown> => {
    const response = await fetch(url);
    const body = await response.text();
    if (!response.ok) {
      throw new RemoteError(response.status, body);
    }
    return JSON.parse(body);
  };

  const doSet = async (args: Record<string, unknown>): Promise<void> => {
    const response = await fetch(url, {
      method: "PUT",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(args),
    });
    if (!response.ok) {
      throw new RemoteError(response.status, await response.text());
    }
    await response.text();
  };

  const members: {
    name: string;
    verbs: string[];
    schema: Record<string, unknown>;
    get?: () => Promise<unknown>;
    set?: (args: Record<string, unknown>) => Promise<void>;
  } = { name, verbs: [...verbs], schema };
  if (verbs.includes("GET")) {
    members.get = doGet;
  }
  if (verbs.includes("PUT")) {
    members.set = doSet;
  }
  // PUT-capable endpoints are callable; read-only ones are plain objects
  if (verbs.includes("PUT")) {
    const callable = (args: Record<string, unknown>) => doSet(args);
    const { name: endpointName, ...rest } = members;
    // Function.name is read-only for plain assignment
    Object.defineProperty(callable, "name", {
      value: endpointName,
      enumerable: true,
      configurable: true,
    });
    return Object.assign(callable, rest);
  }
  return members;
}

function insert(tree: ProxyTree, name: string, node: EndpointNode): void {
  const segments = name.split("/").map(snakeCase);
  let cursor: ProxyTree = tree;
  for (const segment of segments.slice(0, -1)) {
    const existing = cursor[segment];
    if (existing === undefined) {
      const child: ProxyTree = {};
      cursor[segment] = child;
      cursor = child;
    } else if (typeof existing === "object" && !("name" in existing)) {
      cursor = existing as ProxyTree;
    } else {
      throw new MalformedRegistryError(`endpoint name collision at ${name}`);
    }
  }
  const leaf = segments[segments.length - 1];
  if (cursor[leaf] !== undefined) {
    throw new MalformedRegistryError(`endpoint name collision at ${name}`);
  }
  cursor[leaf] = node;
}

/**
 * Introspect a running server and build its remote-control proxy.
 *
 * @param url base address; `tcp://host:port`, `host:port` and
 *   `http://host:port` are all accepted.
 */
export async function connect(url: string): Promise<AppProxy> {
  const base = normalizeBaseUrl(url);
  const registryResponse = await fetchOk(`${base}/registry`);
  let parsed: unknown;
  try {
    parsed = await registryResponse.json();
  } catch {
    throw new MalformedRegistryError(`${base}/registry is not JSON`);
  }
  const registry = parseRegistry(parsed);

  const endpoints: Record<string, EndpointNode> = {};
  const tree: ProxyTree = {};
  for (const [name, verbs] of Object.entries(registry)) {
    const schemaResponse = await fetchOk(`${base}/${name}/schema`);
    let schema: Record<string, unknown>;
    try {
      schema = (await schemaResponse.json()) as Record<string, unknown>;
    } catch {
      throw new MalformedRegistryError(`schema for ${name} is not JSON`);
    }
    const node = makeEndpoint(base, name, verbs, schema);
    endpoints[name] = node;
    insert(tree, name, node);
  }

  return Object.assign(tree, {
    $url: base,
    $registry: registry,
    $endpoints: endpoints,
  }) as AppProxy;
}
