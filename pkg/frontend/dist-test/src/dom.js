/** Tiny DOM helpers for the view layer. */
export function el(tag, attrs = {}, ...children) {
    const node = document.createElement(tag);
    for (const [key, value] of Object.entries(attrs)) {
        if (key === "class")
            node.className = value;
        else
            node.setAttribute(key, value);
    }
    for (const child of children) {
        node.append(child instanceof Node ? child : document.createTextNode(child));
    }
    return node;
}
export function clear(node) {
    while (node.firstChild)
        node.removeChild(node.firstChild);
}
export async function blobToImage(blob) {
    const url = URL.createObjectURL(blob);
    try {
        const img = new Image();
        await new Promise((resolve, reject) => {
            img.onload = () => resolve();
            img.onerror = () => reject(new Error("image decode failed"));
            img.src = url;
        });
        return img;
    }
    finally {
        // the object URL must outlive decoding; revoke on the next tick
        setTimeout(() => URL.revokeObjectURL(url), 0);
    }
}
export async function urlToImage(url) {
    const img = new Image();
    await new Promise((resolve, reject) => {
        img.onload = () => resolve();
        img.onerror = () => reject(new Error(`cannot load ${url}`));
        img.src = url;
    });
    return img;
}
export function toast(message, kind = "ok") {
    const node = el("div", { class: `toast toast-${kind}` }, message);
    document.body.append(node);
    setTimeout(() => node.remove(), 4000);
}
export function inlineError(host, message) {
    const existing = host.querySelector(".inline-error");
    existing?.remove();
    host.append(el("span", { class: "inline-error" }, message));
    setTimeout(() => host.querySelector(".inline-error")?.remove(), 6000);
}
