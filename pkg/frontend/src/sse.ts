// Minimal incremental server-sent-events parser.
//
// Implemented over fetch + ReadableStream rather than EventSource so the
// subscription can carry an AbortSignal (a newer edit cancels the pending
// stream) and so the parser is unit-testable on raw chunks.

export interface SseEvent {
  event: string;
  data: string;
}

export class SseParser {
  private buffer = "";

  /** Feed one chunk of text; returns the events completed by it. */
  push(chunk: string): SseEvent[] {
    this.buffer += chunk;
    const events: SseEvent[] = [];
    let sep;
    while ((sep = this.buffer.indexOf("\n\n")) !== -1) {
      const block = this.buffer.slice(0, sep);
      this.buffer = this.buffer.slice(sep + 2);
      const parsed = parseBlock(block);
      if (parsed !== null) events.push(parsed);
    }
    return events;
  }
}

function parseBlock(block: string): SseEvent | null {
  let event = "message";
  const data: string[] = [];
  for (const line of block.split("\n")) {
    if (line.startsWith("event:")) {
      event = line.slice("event:".length).trimStart();
    } else if (line.startsWith("data:")) {
      data.push(line.slice("data:".length).trimStart());
    }
    // comments and unknown fields are ignored per the SSE format
  }
  if (data.length === 0) return null;
  return { event, data: data.join("\n") };
}

/**
 * Read an SSE response body to completion, invoking onEvent per event.
 * Aborting the fetch's signal rejects the read; callers treat that as a
 * cancelled subscription, not an error.
 */
export async function readEventStream(
  body: ReadableStream<Uint8Array>,
  onEvent: (event: SseEvent) => void,
): Promise<void> {
  const reader = body.getReader();
  const decoder = new TextDecoder();
  const parser = new SseParser();
  try {
    for (;;) {
      const { done, value } = await reader.read();
      if (done) break;
      for (const event of parser.push(decoder.decode(value, { stream: true }))) {
        onEvent(event);
      }
    }
  } finally {
    reader.releaseLock();
  }
}
