/** Error types raised by the remote client. */

/** Server reachable but the reply was not a usable registry/schema. */
export class MalformedRegistryError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "MalformedRegistryError";
  }
}

/** Could not reach the server at all. */
export class ConnectionError extends Error {
  constructor(message: string, options?: { cause?: unknown }) {
    super(message, options);
    this.name = "ConnectionError";
  }
}

/** A request was answered with a non-success status. */
export class RemoteError extends Error {
  readonly status: number;
  readonly body: string;

  constructor(status: number, body: string) {
    super(`remote call failed with ${status}: ${body}`);
    this.name = "RemoteError";
    this.status = status;
    this.body = body;
  }
}

/** The child process could not be spawned. */
export class SpawnError extends Error {
  constructor(message: string, options?: { cause?: unknown }) {
    super(message, options);
    this.name = "SpawnError";
  }
}

/** The child never printed its HTTP-SERVER announcement line. */
export class AnnouncementTimeoutError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "AnnouncementTimeoutError";
  }
}
