import type { ProfileState } from "./types";

/**
 * The profile form. Controls that do not apply to the selected sex are
 * hidden, so every submitted state is consistent by construction.
 */
export class ProfileForm {
  readonly element: HTMLFormElement;
  private state: ProfileState;

  constructor(initial: ProfileState, private readonly onChange: (s: ProfileState) => void) {
    this.state = { ...initial };
    this.element = document.createElement("form");
    this.element.className = "profile-form";
    this.element.addEventListener("submit", (e) => e.preventDefault());
    this.render();
  }

  get value(): ProfileState {
    return { ...this.state };
  }

  private update(patch: Partial<ProfileState>) {
    this.state = { ...this.state, ...patch };
    this.render();
    this.onChange(this.value);
  }

  private render() {
    const s = this.state;
    this.element.replaceChildren(
      this.sexField(s),
      this.toggleField("smoker", "Smoker (20 pack-year history)", s.smoker, (v) =>
        this.update({ smoker: v }),
      ),
      ...(s.sex === "female" ? [this.pregnanciesField(s)] : []),
      ...(s.sex === "male"
        ? [
            this.toggleField("msm", "Man who has sex with men (MSM)", s.msm, (v) =>
              this.update({ msm: v }),
            ),
            this.toggleField(
              "prostate",
              "Routine prostate exams",
              s.prostate_screening,
              (v) => this.update({ prostate_screening: v }),
            ),
          ]
        : []),
    );
  }

  private sexField(s: ProfileState): HTMLElement {
    const wrap = document.createElement("fieldset");
    wrap.className = "field field-sex";
    const legend = document.createElement("legend");
    legend.textContent = "Sex";
    wrap.append(legend);
    for (const sex of ["female", "male"] as const) {
      const label = document.createElement("label");
      const radio = document.createElement("input");
      radio.type = "radio";
      radio.name = "sex";
      radio.value = sex;
      radio.checked = s.sex === sex;
      radio.addEventListener("change", () => this.update({ sex }));
      label.append(radio, ` ${sex}`);
      wrap.append(label);
    }
    return wrap;
  }

  private toggleField(
    id: string,
    text: string,
    checked: boolean,
    apply: (v: boolean) => void,
  ): HTMLElement {
    const wrap = document.createElement("div");
    wrap.className = `field field-${id}`;
    const label = document.createElement("label");
    label.htmlFor = `toggle-${id}`;
    label.textContent = text;
    const box = document.createElement("input");
    box.type = "checkbox";
    box.id = `toggle-${id}`;
    box.checked = checked;
    box.addEventListener("change", () => apply(box.checked));
    wrap.append(box, label);
    return wrap;
  }

  private pregnanciesField(s: ProfileState): HTMLElement {
    const wrap = document.createElement("div");
    wrap.className = "field field-pregnancies";
    const label = document.createElement("label");
    label.htmlFor = "pregnancies";
    label.textContent = "Expected pregnancies";
    const input = document.createElement("input");
    input.type = "number";
    input.id = "pregnancies";
    input.min = "0";
    input.max = "9";
    input.step = "1";
    input.value = String(s.pregnancies);
    input.addEventListener("change", () => {
      const parsed = Math.max(0, Math.floor(Number(input.value) || 0));
      this.update({ pregnancies: parsed });
    });
    wrap.append(label, input);
    return wrap;
  }
}
