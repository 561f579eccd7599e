/** Typed client for the session-service HTTP protocol.
 *
 * This is the UI's only transition mechanism: every state change the
 * explorer makes goes through exactly these calls, so replaying them as
 * raw HTTP reproduces the same history.
 */

import type {
  CreateResponse,
  GetResponse,
  MatrixObj,
  StepResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public code: string,
    message: string,
    public status: number,
  ) {
    super(message);
  }
}

export interface CreateOptions {
  algorithm?: "qr" | "lr";
  shift?: string;
  autoShift?: boolean;
  tol?: number;
}

export interface StepOptions {
  count?: number;
  mu?: number;
  dryRun?: boolean;
  algorithm?: "qr" | "lr";
}

async function parse<T>(response: Response): Promise<T> {
  const body = await response.json().catch(() => null);
  if (!response.ok) {
    const err = body && body.error ? body.error : { code: "InternalError", message: "bad response" };
    throw new ApiError(err.code, err.message, response.status);
  }
  return body as T;
}

export class ApiClient {
  constructor(public baseUrl: string) {}

  private async post<T>(path: string, body: unknown): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    return parse<T>(response);
  }

  async createSession(matrix: MatrixObj, options: CreateOptions = {}): Promise<CreateResponse> {
    return this.post<CreateResponse>("/sessions", { matrix, ...options });
  }

  async step(sessionId: string, options: StepOptions = {}): Promise<StepResponse> {
    return this.post<StepResponse>(`/sessions/${sessionId}/step`, options);
  }

  async rewind(sessionId: string, k: number): Promise<{ state: GetResponse["state"] }> {
    return this.post(`/sessions/${sessionId}/rewind`, { k });
  }

  async getState(sessionId: string): Promise<GetResponse> {
    const response = await fetch(`${this.baseUrl}/sessions/${sessionId}`);
    return parse<GetResponse>(response);
  }
}
