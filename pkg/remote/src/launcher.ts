/**
 * Local process launcher: spawn a service, wait for its announcement,
 * connect to it, and guarantee the child dies with the handle.
 *
 * A launchable service prints exactly one line
 * `HTTP-SERVER tcp://<host>:<port>` to stdout once its server is bound.
 */

import { spawn, type ChildProcess } from "node:child_process";

import { connect, type AppProxy } from "./client.js";
import { AnnouncementTimeoutError, SpawnError } from "./errors.js";

const ANNOUNCEMENT = /^HTTP-SERVER\s+(tcp:\/\/\S+)\s*$/;
const DEFAULT_TIMEOUT_MS = 10_000;

export interface LaunchOptions {
  /** milliseconds to wait for the announcement line (default 10 000) */
  announcementTimeoutMs?: number;
  env?: NodeJS.ProcessEnv;
}

export class LaunchedApp {
  readonly proxy: AppProxy;
  readonly child: ChildProcess;

  constructor(proxy: AppProxy, child: ChildProcess) {
    this.proxy = proxy;
    this.child = child;
  }

  get pid(): number {
    return this.child.pid ?? -1;
  }

  /** Terminate the child (SIGTERM, then SIGKILL) and wait for it to exit. */
  async dispose(): Promise<void> {
    await terminate(this.child);
  }
}

function terminate(child: ChildProcess): Promise<void> {
  return new Promise((resolve) => {
    if (child.exitCode !== null || child.signalCode !== null) {
      resolve();
      return;
    }
    const killTimer = setTimeout(() => child.kill("SIGKILL"), 2_000);
    child.once("exit", () => {
      clearTimeout(killTimer);
      resolve();
    });
    child.kill("SIGTERM");
  });
}

function waitForAnnouncement(child: ChildProcess, timeoutMs: number): Promise<string> {
  return new Promise((resolve, reject) => {
    let buffered = "";
    let done = false;

    const finish = (outcome: () => void) => {
      if (done) return;
      done = true;
      clearTimeout(timer);
      child.stdout?.removeAllListeners("data");
      outcome();
    };

    const timer = setTimeout(() => {
      finish(() =>
        reject(
          new AnnouncementTimeoutError(
            `no HTTP-SERVER line within ${timeoutMs} ms`,
          ),
        ),
      );
    }, timeoutMs);

    child.stdout?.setEncoding("utf8");
    child.stdout?.on("data", (chunk: string) => {
      buffered += chunk;
      let newline;
      while ((newline = buffered.indexOf("\n")) >= 0) {
        const line = buffered.slice(0, newline).trim();
        buffered = buffered.slice(newline + 1);
        const match = ANNOUNCEMENT.exec(line);
        if (match) {
          finish(() => resolve(match[1]));
          return;
        }
      }
    });
    child.once("error", (cause) => {
      finish(() => reject(new SpawnError(`cannot launch: ${cause.message}`, { cause })));
    });
    child.once("exit", (code) => {
      finish(() =>
        reject(
          new AnnouncementTimeoutError(
            `process exited with ${code} before announcing`,
          ),
        ),
      );
    });
  });
}

/**
 * Spawn `command`, wait for its HTTP-SERVER announcement, connect and
 * return the handle.  On any failure the child is already dead when the
 * promise rejects.
 */
export async function launch(
  command: readonly string[],
  options: LaunchOptions = {},
): Promise<LaunchedApp> {
  if (command.length === 0) {
    throw new SpawnError("empty command");
  }
  const child = spawn(command[0], command.slice(1), {
    stdio: ["ignore", "pipe", "pipe"],
    env: options.env ?? process.env,
  });
  try {
    const uri = await waitForAnnouncement(
      child,
      options.announcementTimeoutMs ?? DEFAULT_TIMEOUT_MS,
    );
    const proxy = await connect(uri);
    return new LaunchedApp(proxy, child);
  } catch (error) {
    await terminate(child);
    throw error;
  }
}
