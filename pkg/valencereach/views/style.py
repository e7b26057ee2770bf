"""テキスト出力の装飾"""

INDENT = '  '


def block(name: str, indent: str = INDENT):
    """本文の各行を字下げして name { ... } で囲むデコレータ

    Parameters
    ----------
    name: str
        ブロックの名前
    indent: str default=INDENT
        字下げに使う文字列
    """

    def _block(f):
        def _wrapper(*args, **kwargs) -> str:
            body = f(*args, **kwargs)
            lines = [indent + line for line in body.splitlines()]
            return '\n'.join([f'{name} {{', *lines, '}'])

        return _wrapper

    return _block


def section(title: str, body: str) -> str:
    """見出し付きの段落"""

    return f'{title}:\n' + '\n'.join(INDENT + line for line in body.splitlines())
