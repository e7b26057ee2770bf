"""メインファイル"""
import sys

from valencereach.controllers import cli_ctrl


def main() -> None:
    """メイン関数"""

    sys.exit(cli_ctrl.run_cli(sys.argv[1:]))


if __name__ == '__main__':
    main()
