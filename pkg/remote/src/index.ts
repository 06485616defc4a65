export {
  connect,
  normalizeBaseUrl,
  snakeCase,
  type AppProxy,
  type Endpoint,
  type EndpointNode,
  type ProxyTree,
  type PutFn,
  type Registry,
} from "./client.js";
export { launch, LaunchedApp, type LaunchOptions } from "./launcher.js";
export {
  AnnouncementTimeoutError,
  ConnectionError,
  MalformedRegistryError,
  RemoteError,
  SpawnError,
} from "./errors.js";
