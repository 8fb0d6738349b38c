import os
import ujson


def save_as_json(dictionary_or_list, filename: str):
    with open(filename, "w") as fp:
        ujson.dump(dictionary_or_list, fp, indent=4)


def load_json(filename: str):
    if not os.path.exists(filename):
        raise FileNotFoundError(f"Could not find json file: {filename}")
    with open(filename) as json_file:
        return ujson.load(json_file)


def to_json_line(record: dict) -> str:
    # ujson keeps insertion order, so reports keep their declared field order
    return ujson.dumps(record, ensure_ascii=False)


def write_json_lines(records, filename: str):
    with open(filename, "w") as fp:
        for record in records:
            fp.write(to_json_line(record) + "\n")


def load_json_lines(filename: str) -> list:
    with open(filename) as fp:
        return [ujson.loads(line) for line in fp if line.strip()]
