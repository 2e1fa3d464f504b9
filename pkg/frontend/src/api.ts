// Typed client for the session service.  All calls go through fetch;
// mutating calls (create/step/edit/undo) are serialized client-side so a
// session never has more than one mutation in flight.

import { EditSpec, ExportFormat, PolygonDocument, SessionView, StepView } from './types.js';

export class ApiError extends Error {
    constructor(
        readonly status: number,
        message: string,
    ) {
        super(message);
        this.name = 'ApiError';
    }
}

export class MutationPending extends Error {
    constructor(id: string) {
        super(`session ${id} already has a mutating request in flight`);
        this.name = 'MutationPending';
    }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class SessionApi {
    private inFlight = new Set<string>();

    constructor(
        readonly base: string,
        private fetchFn: FetchLike = (url, init) => fetch(url, init),
    ) {}

    pending(id: string): boolean {
        return this.inFlight.has(id);
    }

    async create(doc: PolygonDocument): Promise<{ id: string; state: SessionView }> {
        const resp = await this.fetchFn(`${this.base}/sessions`, {
            method: 'POST',
            headers: { 'content-type': 'application/json' },
            body: JSON.stringify(doc),
        });
        return await this.parse(resp);
    }

    async state(id: string): Promise<SessionView> {
        const resp = await this.fetchFn(`${this.base}/sessions/${id}`);
        return await this.parse(resp);
    }

    async step(id: string, dz: number): Promise<{ result: StepView; state: SessionView }> {
        return await this.mutate(id, `/sessions/${id}/step`, { dz });
    }

    async edit(id: string, spec: EditSpec): Promise<{ state: SessionView }> {
        return await this.mutate(id, `/sessions/${id}/edit`, spec);
    }

    async undo(id: string): Promise<{ state: SessionView }> {
        return await this.mutate(id, `/sessions/${id}/undo`, null);
    }

    async exportBytes(id: string, format: ExportFormat): Promise<Uint8Array> {
        const resp = await this.fetchFn(`${this.base}/sessions/${id}/export?format=${format}`);
        if (!resp.ok) {
            throw new ApiError(resp.status, await this.errorText(resp));
        }
        return new Uint8Array(await resp.arrayBuffer());
    }

    private async mutate<T>(id: string, path: string, body: unknown): Promise<T> {
        if (this.inFlight.has(id)) {
            throw new MutationPending(id);
        }
        this.inFlight.add(id);
        try {
            const resp = await this.fetchFn(`${this.base}${path}`, {
                method: 'POST',
                headers: { 'content-type': 'application/json' },
                body: body === null ? undefined : JSON.stringify(body),
            });
            return await this.parse(resp);
        } finally {
            this.inFlight.delete(id);
        }
    }

    private async parse<T>(resp: Response): Promise<T> {
        if (!resp.ok) {
            throw new ApiError(resp.status, await this.errorText(resp));
        }
        return (await resp.json()) as T;
    }

    private async errorText(resp: Response): Promise<string> {
        try {
            const body = await resp.json();
            if (body && typeof body.error === 'string') {
                return body.error;
            }
            return JSON.stringify(body);
        } catch {
            return `request failed with status ${resp.status}`;
        }
    }
}
