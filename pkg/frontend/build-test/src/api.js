/** Thin client for the camscout labeling endpoints. */
export class ApiError extends Error {
    status;
    constructor(message, status) {
        super(message);
        this.status = status;
    }
}
export class ApiClient {
    baseUrl;
    fetchFn;
    constructor(baseUrl = '', fetchFn = (url, init) => fetch(url, init)) {
        this.baseUrl = baseUrl;
        this.fetchFn = fetchFn;
    }
    /** Oldest-first queue of framesets nobody has labeled yet. */
    async fetchUnlabeled() {
        let resp;
        try {
            resp = await this.fetchFn(`${this.baseUrl}/api/candidates?unlabeled=true`);
        }
        catch (err) {
            throw new ApiError(`cannot reach server: ${String(err)}`);
        }
        if (!resp.ok) {
            throw new ApiError(`candidate fetch failed (${resp.status})`, resp.status);
        }
        return (await resp.json());
    }
    /**
     * Submit one human label. Distinguishes the two expected rejections:
     * 409 (someone already labeled it; skip forward) and 422 (the server's
     * guard refused the label; show why, stay put).
     */
    async submitLabel(submission) {
        let resp;
        try {
            resp = await this.fetchFn(`${this.baseUrl}/api/labels`, {
                method: 'POST',
                headers: { 'Content-Type': 'application/json' },
                body: JSON.stringify(submission),
            });
        }
        catch (err) {
            throw new ApiError(`cannot reach server: ${String(err)}`);
        }
        if (resp.status === 201)
            return { kind: 'ok' };
        const detail = await detailOf(resp);
        if (resp.status === 409)
            return { kind: 'conflict', detail };
        if (resp.status === 422)
            return { kind: 'rejected', detail };
        throw new ApiError(`label submit failed (${resp.status}): ${detail}`, resp.status);
    }
}
async function detailOf(resp) {
    try {
        const body = (await resp.json());
        if (typeof body.detail === 'string')
            return body.detail;
        return JSON.stringify(body.detail ?? body);
    }
    catch {
        return resp.statusText || `HTTP ${resp.status}`;
    }
}
