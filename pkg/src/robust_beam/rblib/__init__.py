"""The robust-beam library - computational core."""
