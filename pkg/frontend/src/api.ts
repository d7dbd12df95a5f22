import type {
  CreatedMatch,
  EventBatch,
  LegalMove,
  MatchEvent,
  MatchView,
  MoveAck,
} from "./types.js";

/** What the client needs from a service; tests substitute a mock. */
export interface ServiceApi {
  createMatch(body: Record<string, unknown>): Promise<CreatedMatch>;
  getView(matchId: string, token: string): Promise<MatchView>;
  submitMove(matchId: string, token: string, move: LegalMove): Promise<MoveAck>;
  events(
    matchId: string,
    token: string,
    after: number,
    wait?: number,
  ): Promise<EventBatch>;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: unknown,
  ) {
    super(`service error ${status}`);
  }
}

async function asJson<T>(resp: Response): Promise<T> {
  if (!resp.ok) {
    let detail: unknown = null;
    try {
      detail = (await resp.json()).detail;
    } catch {
      /* non-json error body */
    }
    throw new ApiError(resp.status, detail);
  }
  return (await resp.json()) as T;
}

export class HttpService implements ServiceApi {
  constructor(private base: string = "") {}

  createMatch(body: Record<string, unknown>): Promise<CreatedMatch> {
    return fetch(`${this.base}/matches`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    }).then((r) => asJson<CreatedMatch>(r));
  }

  getView(matchId: string, token: string): Promise<MatchView> {
    const q = new URLSearchParams({ token });
    return fetch(`${this.base}/matches/${matchId}/view?${q}`).then((r) =>
      asJson<MatchView>(r),
    );
  }

  submitMove(matchId: string, token: string, move: LegalMove): Promise<MoveAck> {
    return fetch(`${this.base}/matches/${matchId}/moves`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ token, ...move }),
    }).then((r) => asJson<MoveAck>(r));
  }

  events(
    matchId: string,
    token: string,
    after: number,
    wait = 20,
  ): Promise<EventBatch> {
    const q = new URLSearchParams({
      token,
      after: String(after),
      wait: String(wait),
    });
    return fetch(`${this.base}/matches/${matchId}/events?${q}`).then((r) =>
      asJson<EventBatch>(r),
    );
  }

  /** Server-push move feed; returns a disposer. */
  openStream(
    matchId: string,
    token: string,
    after: number,
    onEvent: (event: MatchEvent) => void,
  ): () => void {
    const q = new URLSearchParams({
      token,
      after: String(after),
      stream: "1",
    });
    const source = new EventSource(`${this.base}/matches/${matchId}/events?${q}`);
    source.onmessage = (msg) => onEvent(JSON.parse(msg.data) as MatchEvent);
    return () => source.close();
  }
}
