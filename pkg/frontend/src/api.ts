/**
 * Typed client for the approximation service.
 *
 * The UI is a pure client: every number it displays originates from one
 * of these calls. Field names follow interface_schema.json shipped with
 * the service package.
 */

export interface CurvePayload {
  delta: number;
  r_validity: number;
  samples: [number, number][];
}

export interface RunSummary {
  index: number;
  delta: number;
  center: number[];
  radius: number;
  seed: number;
  status: string;
  gap_estimate: number;
  region_of_validity: number;
  vertices: [number, number][];
  vertices_shifted: [number, number][];
  vertex_kinds: string[];
  far_points: [number, number][];
  X: number[][];
  bound?: number;
  bound_omitted_reason?: string;
}

export interface RefineResult {
  image: [number, number];
  x: number[];
  t: number;
  status: string;
}

export interface SessionStatus {
  active: boolean;
  runs: number;
  updated_unix: number;
  last_error: string | null;
}

export class ServiceError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

async function expectOk(res: Response): Promise<any> {
  if (!res.ok) {
    let detail = res.statusText;
    try {
      const body = await res.json();
      detail = body.detail ?? detail;
    } catch {
      /* non-json error body */
    }
    throw new ServiceError(res.status, detail);
  }
  return res.json();
}

export class ApiClient {
  constructor(public baseUrl: string) {}

  async createSession(problem: object): Promise<string> {
    const res = await fetch(`${this.baseUrl}/sessions`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ problem }),
    });
    const body = await expectOk(res);
    return body.session_id as string;
  }

  async curve(delta: number, count = 400): Promise<CurvePayload> {
    const res = await fetch(
      `${this.baseUrl}/curve?delta=${delta}&count=${count}`,
    );
    return expectOk(res);
  }

  async approximate(
    sessionId: string,
    req: { delta: number; center: number[]; radius: number; seed?: number },
    wait = true,
  ): Promise<RunSummary & { status: string }> {
    const res = await fetch(
      `${this.baseUrl}/sessions/${sessionId}/approximate`,
      {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ seed: 0, wait, ...req }),
      },
    );
    return expectOk(res);
  }

  async status(sessionId: string): Promise<SessionStatus> {
    const res = await fetch(`${this.baseUrl}/sessions/${sessionId}/status`);
    return expectOk(res);
  }

  async result(sessionId: string, index: number): Promise<RunSummary> {
    const res = await fetch(
      `${this.baseUrl}/sessions/${sessionId}/result/${index}`,
    );
    return expectOk(res);
  }

  async history(sessionId: string): Promise<RunSummary[]> {
    const res = await fetch(`${this.baseUrl}/sessions/${sessionId}/history`);
    const body = await expectOk(res);
    return body.entries as RunSummary[];
  }

  async refine(
    sessionId: string,
    point: number[],
    direction?: number[],
  ): Promise<RefineResult> {
    const res = await fetch(`${this.baseUrl}/sessions/${sessionId}/refine`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ point, direction: direction ?? null }),
    });
    return expectOk(res);
  }
}
