/**
 * Minimal ZIP writer (store method, no compression) so the evaluation
 * page can upload image sets as single archives without a dependency.
 */
const CRC_TABLE = (() => {
    const table = new Uint32Array(256);
    for (let n = 0; n < 256; n++) {
        let c = n;
        for (let k = 0; k < 8; k++)
            c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
        table[n] = c >>> 0;
    }
    return table;
})();
export function crc32(data) {
    let crc = 0xffffffff;
    for (let i = 0; i < data.length; i++) {
        crc = CRC_TABLE[(crc ^ data[i]) & 0xff] ^ (crc >>> 8);
    }
    return (crc ^ 0xffffffff) >>> 0;
}
function u16(value) {
    return [value & 0xff, (value >> 8) & 0xff];
}
function u32(value) {
    return [value & 0xff, (value >> 8) & 0xff, (value >> 16) & 0xff, (value >>> 24) & 0xff];
}
export function buildZip(files) {
    const encoder = new TextEncoder();
    const chunks = [];
    const entries = [];
    for (const file of files) {
        const name = encoder.encode(file.name);
        const crc = crc32(file.data);
        const offset = chunks.length;
        // local file header: store method, no flags
        chunks.push(...u32(0x04034b50), ...u16(20), ...u16(0), ...u16(0), ...u16(0), ...u16(0), ...u32(crc), ...u32(file.data.length), ...u32(file.data.length), ...u16(name.length), ...u16(0));
        for (const b of name)
            chunks.push(b);
        for (const b of file.data)
            chunks.push(b);
        entries.push({ name, data: file.data, crc, offset });
    }
    const centralStart = chunks.length;
    for (const entry of entries) {
        chunks.push(...u32(0x02014b50), ...u16(20), ...u16(20), ...u16(0), ...u16(0), ...u16(0), ...u16(0), ...u32(entry.crc), ...u32(entry.data.length), ...u32(entry.data.length), ...u16(entry.name.length), ...u16(0), ...u16(0), ...u16(0), ...u16(0), ...u32(0), ...u32(entry.offset));
        for (const b of entry.name)
            chunks.push(b);
    }
    const centralSize = chunks.length - centralStart;
    chunks.push(...u32(0x06054b50), ...u16(0), ...u16(0), ...u16(entries.length), ...u16(entries.length), ...u32(centralSize), ...u32(centralStart), ...u16(0));
    return new Uint8Array(chunks);
}
