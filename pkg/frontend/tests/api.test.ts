// Service client: envelope parsing, error mapping, and the client-side
// guarantee that a session never has two mutating requests in flight.

import { describe, expect, it } from 'vitest';

import { ApiError, MutationPending, SessionApi } from '../src/api.js';
import { jsonResponse, squareState } from './helpers.js';

const BASE = 'http://service.test';

describe('SessionApi', () => {
    it('posts the document and unwraps the create envelope', async () => {
        const state = squareState();
        const seen: { url?: string; body?: string } = {};
        const api = new SessionApi(BASE, async (url, init) => {
            seen.url = url;
            seen.body = init?.body as string;
            return jsonResponse({ id: state.id, state });
        });
        const { id } = await api.create({ loops: [], edges: [] });
        expect(id).toBe(state.id);
        expect(seen.url).toBe(`${BASE}/sessions`);
        expect(JSON.parse(seen.body!)).toEqual({ loops: [], edges: [] });
    });

    it('maps service errors onto ApiError with the reported message', async () => {
        const api = new SessionApi(BASE, async () =>
            jsonResponse({ error: 'cannot edit a terminated session' }, 409),
        );
        const err = await api.edit('s1', { remove_vertex: { id: 3 } }).catch((e) => e);
        expect(err).toBeInstanceOf(ApiError);
        expect(err.status).toBe(409);
        expect(err.message).toBe('cannot edit a terminated session');
    });

    it('allows only one in-flight mutating request per session', async () => {
        let release!: (r: Response) => void;
        const gate = new Promise<Response>((resolve) => {
            release = resolve;
        });
        const api = new SessionApi(BASE, () => gate);

        const first = api.step('s1', 0.1);
        expect(api.pending('s1')).toBe(true);
        await expect(api.step('s1', 0.1)).rejects.toBeInstanceOf(MutationPending);
        // other sessions are independent
        expect(api.pending('s2')).toBe(false);

        release(jsonResponse({ result: {}, state: squareState() }));
        await first;
        expect(api.pending('s1')).toBe(false);
    });

    it('releases the in-flight slot when a mutation fails', async () => {
        const api = new SessionApi(BASE, async () => jsonResponse({ error: 'nope' }, 422));
        await expect(api.undo('s1')).rejects.toBeInstanceOf(ApiError);
        expect(api.pending('s1')).toBe(false);
    });

    it('fetches exports as raw bytes', async () => {
        const payload = '{"z":0.5,"status":"terminated"}';
        const api = new SessionApi(BASE, async (url) => {
            expect(url).toBe(`${BASE}/sessions/s1/export?format=json`);
            return new Response(payload, { status: 200 });
        });
        const bytes = await api.exportBytes('s1', 'json');
        expect(new TextDecoder().decode(bytes)).toBe(payload);
    });

    it('reports non-JSON failures by status code', async () => {
        const api = new SessionApi(BASE, async () => new Response('boom', { status: 500 }));
        const err = await api.state('s1').catch((e) => e);
        expect(err).toBeInstanceOf(ApiError);
        expect(err.message).toContain('500');
    });
});
