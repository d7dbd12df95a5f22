/** Browser entry point: wire the controller to the real service. */

import { HttpService } from "./api.js";
import { MatchController } from "./controller.js";

function start(): void {
  const board = document.getElementById("board")!;
  const pickerBox = document.getElementById("picker")!;
  const controller = new MatchController(new HttpService(""), board, pickerBox);
  const mode = (document.getElementById("mode") as HTMLSelectElement).value;
  const body: Record<string, unknown> =
    mode === "blind"
      ? { mode: "blind_random" }
      : { mode: "explicit", strategy: mode };
  document.getElementById("setup")!.hidden = true;
  void controller.create(body);
}

document.getElementById("start")!.addEventListener("click", start);
