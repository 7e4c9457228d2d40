'use strict';

// State: files hold ASCII text only; the symbol toggle changes what the
// textarea shows, never what is sent.
const state = {
  files: new Map(),
  current: null,
  diagnostics: [],
  core: [],
  display: null,   // {text, position_map} while symbols are on
  socket: null,
  grid: null,
};

const $ = (id) => document.getElementById(id);
const source = $('source');
const highlight = $('highlight');

async function api(method, path, body) {
  const init = { method, headers: {} };
  if (body !== undefined) {
    init.body = JSON.stringify(body);
    init.headers['Content-Type'] = 'application/json';
  }
  const response = await fetch(path, init);
  let data = {};
  try { data = await response.json(); } catch (e) { /* empty body */ }
  return { status: response.status, data };
}

function status(text) { $('status').textContent = text; }

function filesPayload() {
  return [...state.files].map(([name, content]) => ({ name, content }));
}

// --- positions ------------------------------------------------------------

function codePoints(text) { return Array.from(text); }

function lineStarts(chars) {
  const starts = [0];
  chars.forEach((c, i) => { if (c === '\n') starts.push(i + 1); });
  return starts;
}

// 1-based line/col in code points to an offset, clamped to the document.
function offsetOf(starts, length, line, col) {
  if (line < 1) return 0;
  if (line > starts.length) {
    console.warn('diagnostic past end of document clamped', line, col);
    return length;
  }
  return Math.min(starts[line - 1] + Math.max(col, 1) - 1, length);
}

// Source offset to display offset through the symbol position map.
function toDisplay(offset) {
  if (!state.display) return offset;
  const map = state.display.position_map;
  let lo = 0, hi = map.length - 1;
  while (lo < hi) {
    const mid = (lo + hi) >> 1;
    if (map[mid] < offset) lo = mid + 1; else hi = mid;
  }
  return lo;
}

// --- editor ---------------------------------------------------------------

function asciiText() { return state.files.get(state.current) ?? ''; }

async function showCurrent() {
  const text = asciiText();
  if ($('symbols').checked) {
    const { data } = await api('POST', '/api/symbols', { text });
    state.display = data;
    source.value = data.text;
  } else {
    state.display = null;
    source.value = text;
  }
  await render();
}

let renderSeq = 0;
async function render() {
  const seq = ++renderSeq;
  const shown = source.value;
  const { data } = await api('POST', '/api/tokens', { text: shown });
  if (seq !== renderSeq) return;
  const chars = codePoints(shown);
  const starts = lineStarts(chars);
  const classes = chars.map(() => []);
  const tips = chars.map(() => null);
  for (const span of data.spans ?? []) {
    const a = offsetOf(starts, chars.length, span.range.line, span.range.col);
    const b = offsetOf(starts, chars.length, span.range.end_line, span.range.end_col);
    for (let i = a; i < b; i++) classes[i].push(span.class);
  }
  // Diagnostic positions refer to the ASCII source.
  const srcChars = codePoints(asciiText());
  const srcStarts = lineStarts(srcChars);
  const marks = [...state.diagnostics, ...state.core].filter((d) => d.file === state.current);
  for (const d of marks) {
    let a = toDisplay(offsetOf(srcStarts, srcChars.length, d.range.line, d.range.col));
    let b = toDisplay(offsetOf(srcStarts, srcChars.length, d.range.end_line, d.range.end_col));
    if (b <= a) b = a + 1;
    a = Math.min(a, chars.length); b = Math.min(b, chars.length + 1);
    const tip = d.severity === 'core' ? [d.message, ...(d.instantiations ?? [])].join('\n') : d.message;
    for (let i = a; i < b && i < chars.length; i++) {
      classes[i].push('sq-' + d.severity);
      tips[i] = tip;
    }
  }
  let html = '';
  let i = 0;
  while (i < chars.length) {
    let j = i + 1;
    const key = classes[i].join(' ');
    while (j < chars.length && classes[j].join(' ') === key && tips[j] === tips[i]) j++;
    const text = escapeHtml(chars.slice(i, j).join(''));
    const tip = tips[i] ? ` data-tip="${escapeHtml(tips[i])}"` : '';
    html += key || tip ? `<span class="${key}"${tip}>${text}</span>` : text;
    i = j;
  }
  highlight.innerHTML = html + '\n';
}

function escapeHtml(s) {
  return s.replace(/[&<>"]/g, (c) => ({ '&': '&amp;', '<': '&lt;', '>': '&gt;', '"': '&quot;' }[c]));
}

let checkTimer = null;
async function onEdit() {
  if (state.display) {
    const { data } = await api('POST', '/api/symbols', { text: source.value, reverse: true });
    state.files.set(state.current, data.text);
    const caret = source.selectionStart;
    const again = await api('POST', '/api/symbols', { text: data.text });
    state.display = again.data;
    if (source.value !== again.data.text) {
      source.value = again.data.text;
      source.selectionStart = source.selectionEnd = Math.min(caret, source.value.length);
    }
  } else {
    state.files.set(state.current, source.value);
  }
  state.core = [];
  render();
  clearTimeout(checkTimer);
  checkTimer = setTimeout(check, 400);
}

async function check() {
  const { data } = await api('POST', '/api/check', { files: filesPayload() });
  state.diagnostics = data.diagnostics ?? [];
  listDiagnostics();
  render();
}

function listDiagnostics() {
  const list = $('diagnostics');
  list.innerHTML = '';
  for (const d of [...state.diagnostics, ...state.core]) {
    const li = document.createElement('li');
    li.className = 'sq-' + d.severity;
    const extra = d.instantiations?.length ? `  [${d.instantiations.join('; ')}]` : '';
    li.textContent = `${d.file}:${d.range.line}:${d.range.col}: ${d.severity}: ${d.message}${extra}`;
    li.onclick = () => openFile(d.file);
    list.appendChild(li);
  }
}

function caretPosition() {
  const before = codePoints(source.value.slice(0, source.selectionStart));
  const starts = lineStarts(before);
  return { line: starts.length, col: before.length - starts[starts.length - 1] + 1 };
}

async function onKeyDown(event) {
  if (!$('completions').hidden && handleCompletionKey(event)) return;
  if (event.key === 'Enter' && !state.display) {
    event.preventDefault();
    const pos = source.selectionStart;
    const text = source.value.slice(0, pos) + '\n' + source.value.slice(source.selectionEnd);
    const line = caretPosition().line + 1;
    const { data } = await api('POST', '/api/indent', { text, line });
    const pad = ' '.repeat(data.column ?? 0);
    source.value = text.slice(0, pos + 1) + pad + text.slice(pos + 1);
    source.selectionStart = source.selectionEnd = pos + 1 + pad.length;
    onEdit();
  } else if (event.key === ' ' && event.ctrlKey) {
    event.preventDefault();
    complete();
  }
}

// --- completion -----------------------------------------------------------

let completionItems = [];
let completionIndex = 0;

async function complete() {
  if (state.display) return;
  const { line, col } = caretPosition();
  const { data } = await api('POST', '/api/complete', { text: source.value, line, col });
  completionItems = data.candidates ?? [];
  const list = $('completions');
  if (!completionItems.length) { list.hidden = true; return; }
  completionIndex = 0;
  list.innerHTML = '';
  completionItems.forEach((c, i) => {
    const li = document.createElement('li');
    li.textContent = c.kind === 'snippet' ? `${c.label}  (${c.description})` : c.label;
    li.onmousedown = (e) => { e.preventDefault(); acceptCompletion(i); };
    list.appendChild(li);
  });
  const lineHeight = 14 * 1.4;
  list.style.top = `${8 + line * lineHeight - source.scrollTop + 40}px`;
  list.style.left = `${8 + col * 8.4}px`;
  list.hidden = false;
  markCompletion();
}

function markCompletion() {
  [...$('completions').children].forEach((li, i) => li.classList.toggle('active', i === completionIndex));
}

function handleCompletionKey(event) {
  if (event.key === 'ArrowDown' || event.key === 'ArrowUp') {
    const n = completionItems.length;
    completionIndex = (completionIndex + (event.key === 'ArrowDown' ? 1 : n - 1)) % n;
    markCompletion();
  } else if (event.key === 'Enter' || event.key === 'Tab') {
    acceptCompletion(completionIndex);
  } else if (event.key === 'Escape') {
    $('completions').hidden = true;
  } else {
    $('completions').hidden = true;
    return false;
  }
  event.preventDefault();
  return true;
}

function acceptCompletion(i) {
  const c = completionItems[i];
  $('completions').hidden = true;
  const pos = source.selectionStart;
  let start = pos;
  while (start > 0 && /[A-Za-z0-9_]/.test(source.value[start - 1])) start--;
  source.value = source.value.slice(0, start) + c.insert_text + source.value.slice(pos);
  source.selectionStart = source.selectionEnd = start + c.insert_text.length;
  onEdit();
}

// --- files ----------------------------------------------------------------

async function loadWorkspace() {
  const { data } = await api('GET', '/api/files');
  state.files.clear();
  for (const name of (data.files ?? []).filter((n) => n.endsWith('.idp'))) {
    const r = await api('GET', '/api/file?path=' + encodeURIComponent(name));
    if (r.status === 200) state.files.set(name, r.data.content);
  }
  if (!state.files.size) state.files.set('main.idp', '');
  fillFileList();
  await openFile([...state.files.keys()][0]);
  check();
}

function fillFileList() {
  const list = $('file-list');
  list.innerHTML = '';
  for (const name of state.files.keys()) list.add(new Option(name, name));
}

async function openFile(name) {
  if (!state.files.has(name)) return;
  state.current = name;
  $('file-list').value = name;
  await showCurrent();
}

async function replaceFiles(files) {
  state.files.clear();
  for (const f of files) state.files.set(f.name, f.content);
  state.core = [];
  fillFileList();
  await openFile(files[0]?.name);
  check();
}

async function save() {
  const r = await api('PUT', '/api/file', { path: state.current, content: asciiText() });
  status(r.status === 200 ? `saved ${state.current}` : `save failed: ${r.data.error ?? r.status}`);
}

async function share() {
  const r = await api('POST', '/api/share', { files: filesPayload() });
  if (r.status !== 200) { status(`share failed: ${r.data.error ?? r.status}`); return; }
  status(r.data.url);
  navigator.clipboard?.writeText(r.data.url).catch(() => {});
}

async function reindent() {
  if (state.display) return;
  const { data } = await api('POST', '/api/indent', { text: asciiText() });
  state.files.set(state.current, data.text);
  await showCurrent();
}

// --- inference --------------------------------------------------------------

async function infer() {
  const kind = $('inference').value;
  const r = await api('POST', '/api/inference', {
    files: filesPayload(), kind, theory: $('theory').value, structure: $('structure').value,
    max_models: 10,
  });
  clearTerminal();
  if (r.status !== 200) {
    print(`${r.data.error ?? 'error ' + r.status}${r.data.limit ? ': ' + r.data.limit : ''}\n`, 'stderr');
    state.diagnostics = r.data.diagnostics ?? state.diagnostics;
  } else if (kind === 'modelexpand') {
    if (!r.data.satisfiable) print('Unsatisfiable: no models.\n');
    r.data.models.forEach((m, i) => print(`Model ${i + 1}:\n${m}`));
  } else if (kind === 'propagate') {
    print(r.data.consistent ? r.data.structure : 'Inconsistent: no models.\n');
  } else {
    state.core = r.data.satisfiable ? [] : r.data.diagnostics;
    print(r.data.satisfiable ? 'Satisfiable: no unsat core.\n' : `Unsat core: ${state.core.length} sentence(s), see the editor.\n`);
  }
  listDiagnostics();
  render();
}

// --- runs -----------------------------------------------------------------

function clearTerminal() { $('terminal').innerHTML = ''; }

function print(text, cls) {
  const span = document.createElement('span');
  if (cls) span.className = cls;
  span.textContent = text;
  $('terminal').appendChild(span);
  $('terminal').scrollTop = $('terminal').scrollHeight;
}

function startRun() {
  if (state.socket) state.socket.close();
  clearTerminal();
  state.grid = null;
  $('viz').hidden = true;
  const mode = $('run-mode').value;
  const url = `${location.protocol === 'https:' ? 'wss' : 'ws'}://${location.host}/ws/session`;
  const socket = new WebSocket(url);
  state.socket = socket;
  socket.onopen = () => socket.send(JSON.stringify({ type: 'start', mode, files: filesPayload(), entry: 'main' }));
  socket.onmessage = (m) => onEvent(JSON.parse(m.data));
  socket.onclose = () => {
    if (state.socket === socket) state.socket = null;
    $('kill').disabled = true;
    $('input-line').hidden = true;
  };
  $('kill').disabled = false;
}

function onEvent(e) {
  switch (e.type) {
    case 'stdout': print(e.data); break;
    case 'stderr': print(e.data, 'stderr'); break;
    case 'ask':
      $('prompt').textContent = e.prompt;
      $('input-line').hidden = false;
      $('input').focus();
      break;
    case 'viz': drawViz(e.commands); break;
    case 'limit': print(`limit exceeded: ${e.kind}\n`, 'limit'); break;
    case 'exit':
      print(`[exit ${e.code}]\n`, 'exit');
      $('input-line').hidden = true;
      break;
  }
}

function sendInput(event) {
  event.preventDefault();
  const line = $('input').value;
  $('input').value = '';
  print($('prompt').textContent + line + '\n');
  $('input-line').hidden = true;
  state.socket?.send(JSON.stringify({ type: 'stdin', data: line }));
}

function drawViz(commands) {
  const canvas = $('viz');
  const ctx = canvas.getContext('2d');
  for (const c of commands) {
    if (c.kind === 'grid') {
      state.grid = { width: c.width, height: c.height, cells: new Map(), labels: new Map() };
    } else if (!state.grid) {
      console.warn('viz command before a grid was drawn', c);
      continue;
    } else if (c.kind === 'cell') {
      state.grid.cells.set(`${c.x},${c.y}`, c.color);
    } else if (c.kind === 'label') {
      state.grid.labels.set(`${c.x},${c.y}`, c.text);
    }
  }
  if (!state.grid) return;
  canvas.hidden = false;
  const { width, height } = state.grid;
  const size = Math.floor(Math.min(canvas.width / width, canvas.height / height));
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.font = `${Math.max(10, size / 3)}px sans-serif`;
  ctx.textAlign = 'center';
  ctx.textBaseline = 'middle';
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      ctx.fillStyle = state.grid.cells.get(`${x},${y}`) ?? 'white';
      ctx.fillRect(x * size, y * size, size, size);
      ctx.strokeStyle = '#888';
      ctx.strokeRect(x * size, y * size, size, size);
      const label = state.grid.labels.get(`${x},${y}`);
      if (label) {
        ctx.fillStyle = 'black';
        ctx.fillText(label, x * size + size / 2, y * size + size / 2);
      }
    }
  }
}

function onVizClick(event) {
  if (!state.grid || !state.socket) return;
  const { width, height } = state.grid;
  const canvas = $('viz');
  const size = Math.floor(Math.min(canvas.width / width, canvas.height / height));
  const rect = canvas.getBoundingClientRect();
  const x = Math.floor((event.clientX - rect.left) / size);
  const y = Math.floor((event.clientY - rect.top) / size);
  if (x < 0 || y < 0 || x >= width || y >= height) return;
  state.socket.send(JSON.stringify({ type: 'click', x, y }));
}

// --- tutorials ------------------------------------------------------------

function markdown(text) {
  const out = [];
  let code = null;
  for (const line of text.split('\n')) {
    if (line.startsWith('```')) {
      if (code === null) { code = []; } else { out.push(`<pre>${escapeHtml(code.join('\n'))}</pre>`); code = null; }
      continue;
    }
    if (code !== null) { code.push(line); continue; }
    const heading = /^(#{1,6})\s+(.*)$/.exec(line);
    const inline = (s) => escapeHtml(s).replace(/`([^`]+)`/g, '<code>$1</code>');
    if (heading) out.push(`<h${heading[1].length}>${inline(heading[2])}</h${heading[1].length}>`);
    else if (line.trim()) out.push(`<p>${inline(line)}</p>`);
  }
  if (code !== null) out.push(`<pre>${escapeHtml(code.join('\n'))}</pre>`);
  return out.join('\n');
}

let tutorial = null;
async function loadTutorials() {
  const { data } = await api('GET', '/api/tutorials');
  const list = data.tutorials ?? [];
  $('tutorial').hidden = list.length === 0;
  const select = $('tutorial-list');
  for (const t of list) select.add(new Option(t.title, t.id));
  if (list.length) showTutorial(list[0].id);
}

async function showTutorial(id) {
  const r = await api('GET', '/api/tutorials/' + encodeURIComponent(id));
  if (r.status !== 200) return;
  tutorial = r.data;
  $('tutorial-text').innerHTML = markdown(tutorial.explanation);
}

// --- tooltip --------------------------------------------------------------

function onHover(event) {
  const tip = $('tooltip');
  const hit = document.elementsFromPoint(event.clientX, event.clientY).find((el) => el.dataset?.tip);
  if (!hit) { tip.hidden = true; return; }
  tip.textContent = hit.dataset.tip;
  tip.style.left = `${event.clientX + 12}px`;
  tip.style.top = `${event.clientY + 12}px`;
  tip.hidden = false;
}

// --- wiring ---------------------------------------------------------------

source.addEventListener('input', onEdit);
source.addEventListener('keydown', onKeyDown);
source.addEventListener('scroll', () => { highlight.scrollTop = source.scrollTop; highlight.scrollLeft = source.scrollLeft; });
source.addEventListener('mousemove', onHover);
source.addEventListener('mouseleave', () => { $('tooltip').hidden = true; });
$('file-list').onchange = (e) => openFile(e.target.value);
$('save').onclick = save;
$('share').onclick = share;
$('reindent').onclick = reindent;
$('symbols').onchange = showCurrent;
$('run').onclick = startRun;
$('kill').onclick = () => state.socket?.send(JSON.stringify({ type: 'kill' }));
$('infer').onclick = infer;
$('input-line').onsubmit = sendInput;
$('viz').onclick = onVizClick;
$('tutorial-list').onchange = (e) => showTutorial(e.target.value);
$('tutorial-load').onclick = () => tutorial && replaceFiles(tutorial.files);

(async function init() {
  loadTutorials();
  const shared = /#share=([0-9a-z]+)/.exec(location.hash);
  if (shared) {
    const r = await api('GET', '/api/share/' + shared[1]);
    if (r.status === 200) { await replaceFiles(r.data.files); status(`loaded share ${shared[1]}`); return; }
    status(`share ${shared[1]}: ${r.data.error ?? r.status}`);
  }
  await loadWorkspace();
})();
